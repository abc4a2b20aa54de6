#include "contour/game_engine.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "contour/raster_ops.hpp"

namespace contour::game {

namespace {

// Unbiased index in [0, n) that does not depend on the standard library's
// distribution implementations.
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r = rng();
    while (r >= limit) {
        r = rng();
    }
    return static_cast<std::size_t>(r % bound);
}

template <typename T>
void shuffle(std::vector<T>& items, std::mt19937_64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::swap(items[i - 1], items[uniform_index(rng, i)]);
    }
}

double distance_to_segment(Point p, Point a, Point b) {
    const double vx = b.x - a.x;
    const double vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    double t = 0.0;
    if (len2 > 0.0) {
        t = std::clamp(((p.x - a.x) * vx + (p.y - a.y) * vy) / len2, 0.0, 1.0);
    }
    return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

Point to_point(Pixel p) { return {static_cast<double>(p.x), static_cast<double>(p.y)}; }

}  // namespace

void FieldParams::validate() const {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (n_reward == 0) {
        throw std::invalid_argument("a reward field needs at least one reward point");
    }
    if (!positive(collect_radius) || !positive(penalty_radius) || !positive(reward_value) ||
        !positive(penalty_value)) {
        throw std::invalid_argument("radii, reward and penalty values must be positive");
    }
    if (!(clearance >= 0.0) || !(min_sep >= 0.0)) {
        throw std::invalid_argument("clearance and min_sep must be non-negative");
    }
    if (!(boundary_t >= 0.0 && boundary_t < 1.0)) {
        throw std::invalid_argument("boundary_t must lie in [0,1)");
    }
}

RewardField generate_field(const BinaryMap& boundary, const FieldParams& params, std::uint64_t seed,
                           std::string image_id) {
    params.validate();
    std::mt19937_64 rng(seed);

    RewardField field;
    field.image_id = std::move(image_id);
    field.width = boundary.width();
    field.height = boundary.height();
    field.params = params;
    field.seed = seed;

    auto on_pixels = boundary.pixels();
    if (on_pixels.size() < params.n_reward) {
        throw Error("boundary map has " + std::to_string(on_pixels.size()) + " on-pixels, fewer than the " +
                    std::to_string(params.n_reward) + " reward points requested");
    }
    shuffle(on_pixels, rng);
    const double sep2 = params.min_sep * params.min_sep;
    for (const Pixel& p : on_pixels) {
        if (field.rewards.size() == params.n_reward) {
            break;
        }
        const Point candidate = to_point(p);
        const bool clear = std::none_of(field.rewards.begin(), field.rewards.end(), [&](const RewardPoint& r) {
            const double dx = r.at.x - candidate.x;
            const double dy = r.at.y - candidate.y;
            return dx * dx + dy * dy < sep2;
        });
        if (clear) {
            field.rewards.push_back({candidate, params.reward_value});
        }
    }
    if (field.rewards.size() < params.n_reward) {
        throw Error("only " + std::to_string(field.rewards.size()) + " boundary pixels are at least min_sep apart; " +
                    std::to_string(params.n_reward) + " reward points requested");
    }

    const auto dist2 = squared_distance_transform(boundary);
    const double clearance2 = params.clearance * params.clearance;
    std::vector<Pixel> far;
    for (int y = 0; y < boundary.height(); ++y) {
        for (int x = 0; x < boundary.width(); ++x) {
            if (static_cast<double>(dist2.at(x, y)) >= clearance2) {
                far.push_back({x, y});
            }
        }
    }
    if (far.size() < params.n_penalty) {
        throw Error("only " + std::to_string(far.size()) + " pixels lie at clearance >= " +
                    std::to_string(params.clearance) + "; " + std::to_string(params.n_penalty) +
                    " penalty points requested");
    }
    shuffle(far, rng);
    for (std::size_t k = 0; k < params.n_penalty; ++k) {
        field.penalties.push_back({to_point(far[k]), params.penalty_value});
    }

    field.total_reward = 0.0;
    for (const auto& r : field.rewards) {
        field.total_reward += r.value;
    }
    return field;
}

RewardField generate_field(const SoftMap& boundary, const FieldParams& params, std::uint64_t seed,
                           std::string image_id) {
    params.validate();
    return generate_field(threshold(boundary, params.boundary_t), params, seed, std::move(image_id));
}

GameSession::GameSession(std::string session_id, RewardField field)
    : id_(std::move(session_id)),
      field_(std::move(field)),
      collected_(field_.rewards.size(), 0),
      triggered_(field_.penalties.size(), 0) {
    if (!(field_.total_reward > 0.0)) {
        throw std::invalid_argument("reward field has no reward to collect");
    }
    drawing_.image_id = field_.image_id;
    drawing_.width = field_.width;
    drawing_.height = field_.height;
}

void GameSession::test_segment(Point a, Point b, SegmentScore& out) {
    for (std::size_t k = 0; k < field_.rewards.size(); ++k) {
        if (!collected_[k] && distance_to_segment(field_.rewards[k].at, a, b) <= field_.params.collect_radius) {
            collected_[k] = 1;
            collected_order_.push_back(k);
            const double v = field_.rewards[k].value;
            out.delta += v;
            out.events.push_back({ScoreEvent::Kind::collect, k, v});
        }
    }
    for (std::size_t k = 0; k < field_.penalties.size(); ++k) {
        if (!triggered_[k] && distance_to_segment(field_.penalties[k].at, a, b) <= field_.params.penalty_radius) {
            triggered_[k] = 1;
            triggered_order_.push_back(k);
            const double v = field_.penalties[k].value;
            out.delta -= v;
            out.events.push_back({ScoreEvent::Kind::penalty, k, -v});
        }
    }
}

SegmentScore GameSession::score_segment(const std::vector<Point>& points, bool new_stroke) {
    if (status_ != SessionStatus::open) {
        throw Error("session " + id_ + " is closed");
    }
    if (points.empty()) {
        throw std::invalid_argument("score_segment needs at least one point");
    }
    for (const Point& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw std::invalid_argument("stroke points must be finite");
        }
    }

    if (new_stroke || !last_point_) {
        drawing_.strokes.push_back({{}, static_cast<int>(drawing_.strokes.size())});
        last_point_.reset();
    }
    Stroke& stroke = drawing_.strokes.back();

    SegmentScore out;
    for (Point p : points) {
        p.x = std::clamp(p.x, 0.0, static_cast<double>(field_.width));
        p.y = std::clamp(p.y, 0.0, static_cast<double>(field_.height));
        test_segment(last_point_.value_or(p), p, out);
        if (stroke.points.empty() || !(stroke.points.back() == p)) {
            stroke.points.push_back(p);
        }
        last_point_ = p;
    }
    score_ += out.delta;
    return out;
}

FinalVerdict GameSession::finalize(double cutoff) {
    if (status_ != SessionStatus::open) {
        throw Error("session " + id_ + " is already closed");
    }
    if (!(cutoff > 0.0 && cutoff <= 1.0)) {
        throw std::invalid_argument("cutoff must lie in (0,1]");
    }
    FinalVerdict v;
    v.score_fraction = std::max(score_, 0.0) / field_.total_reward;
    v.status = v.score_fraction >= cutoff ? SessionStatus::accepted : SessionStatus::rejected;
    status_ = v.status;
    return v;
}

Classification classify_submission(const Drawing& d, const RewardField& field, double cutoff) {
    if (d.width != field.width || d.height != field.height) {
        throw DimensionMismatch("drawing is " + std::to_string(d.width) + "x" + std::to_string(d.height) +
                                " but the reward field is " + std::to_string(field.width) + "x" +
                                std::to_string(field.height));
    }
    GameSession session("replay", field);
    for (const Stroke& s : d.strokes) {
        if (!s.points.empty()) {
            session.score_segment(s.points, true);
        }
    }
    const auto verdict = session.finalize(cutoff);
    return {verdict.status == SessionStatus::accepted, verdict.score_fraction};
}

std::string to_string(SessionStatus s) {
    switch (s) {
        case SessionStatus::open:
            return "open";
        case SessionStatus::accepted:
            return "accepted";
        case SessionStatus::rejected:
            return "rejected";
    }
    return "unknown";
}

std::string to_string(ScoreEvent::Kind k) { return k == ScoreEvent::Kind::collect ? "reward" : "penalty"; }

nlohmann::json field_to_json(const RewardField& field) {
    auto points = [](const std::vector<RewardPoint>& pts) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& p : pts) {
            arr.push_back({{"x", p.at.x}, {"y", p.at.y}, {"value", p.value}});
        }
        return arr;
    };
    const auto& p = field.params;
    return {{"image_id", field.image_id},
            {"width", field.width},
            {"height", field.height},
            {"seed", field.seed},
            {"total_reward", field.total_reward},
            {"params",
             {{"n_reward", p.n_reward},
              {"n_penalty", p.n_penalty},
              {"collect_radius", p.collect_radius},
              {"penalty_radius", p.penalty_radius},
              {"clearance", p.clearance},
              {"min_sep", p.min_sep},
              {"reward_value", p.reward_value},
              {"penalty_value", p.penalty_value},
              {"boundary_t", p.boundary_t}}},
            {"rewards", points(field.rewards)},
            {"penalties", points(field.penalties)}};
}

RewardField field_from_json(const nlohmann::json& j) {
    try {
        RewardField f;
        f.image_id = j.at("image_id").get<std::string>();
        f.width = j.at("width").get<int>();
        f.height = j.at("height").get<int>();
        f.seed = j.at("seed").get<std::uint64_t>();
        const auto& p = j.at("params");
        f.params.n_reward = p.at("n_reward").get<std::size_t>();
        f.params.n_penalty = p.at("n_penalty").get<std::size_t>();
        f.params.collect_radius = p.at("collect_radius").get<double>();
        f.params.penalty_radius = p.at("penalty_radius").get<double>();
        f.params.clearance = p.at("clearance").get<double>();
        f.params.min_sep = p.at("min_sep").get<double>();
        f.params.reward_value = p.at("reward_value").get<double>();
        f.params.penalty_value = p.at("penalty_value").get<double>();
        f.params.boundary_t = p.at("boundary_t").get<double>();
        auto points = [](const nlohmann::json& arr) {
            std::vector<RewardPoint> out;
            for (const auto& e : arr) {
                out.push_back({{e.at("x").get<double>(), e.at("y").get<double>()}, e.at("value").get<double>()});
            }
            return out;
        };
        f.rewards = points(j.at("rewards"));
        f.penalties = points(j.at("penalties"));
        f.total_reward = 0.0;
        for (const auto& r : f.rewards) {
            f.total_reward += r.value;
        }
        if (f.width <= 0 || f.height <= 0) {
            throw ParseError("reward field dimensions must be positive");
        }
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed reward field JSON: ") + e.what());
    }
}

nlohmann::json redacted_snapshot(const GameSession& s) {
    return {{"session_id", s.id()},
            {"image_id", s.field().image_id},
            {"width", s.field().width},
            {"height", s.field().height},
            {"score", s.score()},
            {"n_collected", s.collected().size()},
            {"n_triggered", s.triggered().size()},
            {"n_strokes", s.drawing().strokes.size()},
            {"status", to_string(s.status())}};
}

nlohmann::json score_reply(const SegmentScore& score, const GameSession& s) {
    nlohmann::json events = nlohmann::json::array();
    for (const auto& e : score.events) {
        events.push_back({{"kind", to_string(e.kind)}, {"delta", e.delta}});
    }
    return {{"type", "score"}, {"delta", score.delta}, {"score", s.score()}, {"events", std::move(events)}};
}

}  // namespace contour::game
