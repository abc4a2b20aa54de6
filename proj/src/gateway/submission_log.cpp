#include "contour/gateway/submission_log.hpp"

#include <chrono>
#include <ctime>
#include <sstream>

namespace contour::gateway {

nlohmann::json to_json(const SubmissionRecord& r) {
    return {{"timestamp", r.timestamp},
            {"image_id", r.image_id},
            {"session_id", r.session_id},
            {"score_fraction", r.score_fraction},
            {"status", game::to_string(r.status)},
            {"drawing", nlohmann::json::parse(serialize_drawing(r.drawing))}};
}

SubmissionRecord submission_from_json(const nlohmann::json& j) {
    try {
        SubmissionRecord r;
        r.timestamp = j.at("timestamp").get<std::string>();
        r.image_id = j.at("image_id").get<std::string>();
        r.session_id = j.at("session_id").get<std::string>();
        r.score_fraction = j.at("score_fraction").get<double>();
        const auto status = j.at("status").get<std::string>();
        if (status == "accepted") {
            r.status = game::SessionStatus::accepted;
        } else if (status == "rejected") {
            r.status = game::SessionStatus::rejected;
        } else {
            throw ParseError("submission status must be accepted or rejected, got '" + status + "'");
        }
        r.drawing = parse_drawing(j.at("drawing").dump());
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed submission record: ") + e.what());
    }
}

std::string utc_timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

SubmissionLog::SubmissionLog(std::filesystem::path path) : path_(std::move(path)) {
    if (path_.has_parent_path()) {
        std::filesystem::create_directories(path_.parent_path());
    }
    // A torn last line from a crash must not swallow the next record.
    if (std::filesystem::exists(path_) && std::filesystem::file_size(path_) > 0) {
        std::ifstream in(path_, std::ios::binary);
        in.seekg(-1, std::ios::end);
        char last = '\n';
        in.get(last);
        if (last != '\n') {
            std::ofstream fix(path_, std::ios::binary | std::ios::app);
            fix << '\n';
        }
    }
    out_.open(path_, std::ios::binary | std::ios::app);
    if (!out_) {
        throw Error("cannot open submission log " + path_.string());
    }
}

void SubmissionLog::append(const SubmissionRecord& r) {
    const std::string line = to_json(r).dump();
    std::lock_guard lock(mutex_);
    out_ << line << '\n';
    out_.flush();
    if (!out_) {
        throw Error("failed to append to submission log " + path_.string());
    }
}

LoadedSubmissions SubmissionLog::load(const std::filesystem::path& path) {
    LoadedSubmissions result;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return result;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    std::size_t start = 0;
    std::size_t line_no = 0;
    while (start < text.size()) {
        ++line_no;
        const std::size_t nl = text.find('\n', start);
        const bool terminated = nl != std::string::npos;
        const std::string line = text.substr(start, terminated ? nl - start : std::string::npos);
        start = terminated ? nl + 1 : text.size();
        if (line.empty()) {
            continue;
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error&) {
            ++result.torn_lines;
            continue;
        }
        try {
            result.records.push_back(submission_from_json(j));
        } catch (const ParseError& e) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return result;
}

}  // namespace contour::gateway
