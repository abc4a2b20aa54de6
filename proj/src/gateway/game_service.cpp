#include "contour/gateway/game_service.hpp"

#include <algorithm>
#include <random>

#include "contour/raster_ops.hpp"

namespace contour::gateway {

namespace {

std::vector<Point> parse_points(const nlohmann::json& message) {
    auto it = message.find("points");
    if (it == message.end() || !it->is_array()) {
        throw ServiceError(400, "stroke message needs a 'points' array");
    }
    std::vector<Point> points;
    points.reserve(it->size());
    for (const auto& p : *it) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
            throw ServiceError(400, "each point must be an [x, y] number pair");
        }
        points.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    if (points.empty()) {
        throw ServiceError(400, "stroke message has no points");
    }
    return points;
}

// splitmix64 finalizer; decorrelates per-session field seeds.
std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

Drawing submitted_drawing(const game::GameSession& s) {
    Drawing d = s.drawing();
    std::erase_if(d.strokes, [](const Stroke& st) { return st.points.size() < 2; });
    for (std::size_t k = 0; k < d.strokes.size(); ++k) {
        d.strokes[k].order_index = static_cast<int>(k);
    }
    normalize_drawing(d);
    return d;
}

GameService::GameService(ServiceConfig cfg)
    : cfg_(std::move(cfg)), log_(cfg_.dataset_root / "submissions" / "submissions.jsonl") {
    cfg_.params.validate();
    const auto src = cfg_.dataset_root / "fields_src";
    if (!std::filesystem::is_directory(src)) {
        throw Error("dataset " + cfg_.dataset_root.string() + " has no fields_src/ directory");
    }
    for (const auto& entry : std::filesystem::directory_iterator(src)) {
        if (entry.is_regular_file() && entry.path().extension() == ".png") {
            image_ids_.push_back(entry.path().stem().string());
        }
    }
    std::sort(image_ids_.begin(), image_ids_.end());
    if (image_ids_.empty()) {
        throw Error("no boundary maps under " + src.string());
    }
}

nlohmann::json GameService::health() const {
    return {{"status", "ok"}, {"images", image_ids_.size()}};
}

nlohmann::json GameService::next_image() {
    std::lock_guard lock(mutex_);
    const std::string& id = image_ids_[next_image_ % image_ids_.size()];
    ++next_image_;
    return {{"image_id", id}, {"image_url", "/images/" + id}};
}

const BinaryMap& GameService::boundary(const std::string& image_id) {
    auto it = boundaries_.find(image_id);
    if (it == boundaries_.end()) {
        const auto soft = load_soft_map_png(cfg_.dataset_root / "fields_src" / (image_id + ".png"));
        it = boundaries_.emplace(image_id, threshold(soft, cfg_.params.boundary_t)).first;
    }
    return it->second;
}

std::string GameService::fresh_session_id() {
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    char buf[33];
    std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(rng()),
                  static_cast<unsigned long long>(rng()));
    return buf;
}

nlohmann::json GameService::open_session(const nlohmann::json& body) {
    auto it = body.find("image_id");
    if (it == body.end() || !it->is_string()) {
        throw ServiceError(400, "request body needs a string 'image_id'");
    }
    const std::string image_id = it->get<std::string>();
    if (!std::binary_search(image_ids_.begin(), image_ids_.end(), image_id)) {
        throw ServiceError(404, "unknown image '" + image_id + "'");
    }

    std::lock_guard lock(mutex_);
    const std::uint64_t seed = mix(cfg_.seed ^ mix(++session_counter_));
    game::RewardField field;
    try {
        field = game::generate_field(boundary(image_id), cfg_.params, seed, image_id);
    } catch (const Error& e) {
        throw ServiceError(500, "cannot build reward field for " + image_id + ": " + e.what());
    }
    std::string id = fresh_session_id();
    while (sessions_.count(id) != 0) {
        id = fresh_session_id();
    }
    const int width = field.width;
    const int height = field.height;
    sessions_.emplace(id, std::make_shared<Entry>(game::GameSession(id, std::move(field))));
    return {{"session_id", id}, {"width", width}, {"height", height}};
}

std::shared_ptr<GameService::Entry> GameService::find(const std::string& session_id) {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) {
        throw ServiceError(404, "unknown session '" + session_id + "'");
    }
    return it->second;
}

nlohmann::json GameService::session_snapshot(const std::string& session_id) {
    auto entry = find(session_id);
    std::lock_guard lock(entry->mutex);
    return game::redacted_snapshot(entry->session);
}

nlohmann::json GameService::stroke(const std::string& session_id, const nlohmann::json& message) {
    if (!message.is_object() || message.value("type", "") != "stroke_points") {
        throw ServiceError(400, "expected a message of type 'stroke_points'");
    }
    const auto points = parse_points(message);
    const bool new_stroke = message.value("new_stroke", false);

    auto entry = find(session_id);
    std::lock_guard lock(entry->mutex);
    if (entry->session.status() != game::SessionStatus::open) {
        throw ServiceError(409, "session '" + session_id + "' is closed");
    }
    try {
        const auto score = entry->session.score_segment(points, new_stroke);
        return game::score_reply(score, entry->session);
    } catch (const std::invalid_argument& e) {
        throw ServiceError(400, e.what());
    }
}

nlohmann::json GameService::submit(const std::string& session_id) {
    auto entry = find(session_id);
    SubmissionRecord record;
    {
        std::lock_guard lock(entry->mutex);
        if (entry->session.status() != game::SessionStatus::open) {
            throw ServiceError(409, "session '" + session_id + "' was already submitted");
        }
        const auto verdict = entry->session.finalize(cfg_.cutoff);
        record.timestamp = utc_timestamp_now();
        record.image_id = entry->session.field().image_id;
        record.session_id = session_id;
        record.drawing = submitted_drawing(entry->session);
        record.score_fraction = verdict.score_fraction;
        record.status = verdict.status;
    }
    log_.append(record);
    return {{"status", game::to_string(record.status)}, {"score_fraction", record.score_fraction}};
}

std::optional<std::filesystem::path> GameService::image_file(const std::string& image_id) const {
    if (!std::binary_search(image_ids_.begin(), image_ids_.end(), image_id)) {
        return std::nullopt;
    }
    for (const char* ext : {".jpg", ".png"}) {
        auto p = cfg_.dataset_root / "images" / (image_id + ext);
        if (std::filesystem::is_regular_file(p)) {
            return p;
        }
    }
    return std::nullopt;
}

}  // namespace contour::gateway
