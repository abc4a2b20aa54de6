#pragma once

#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "contour/game_engine.hpp"
#include "contour/stroke_model.hpp"

namespace contour::gateway {

struct SubmissionRecord {
    std::string timestamp;  // ISO-8601 UTC
    std::string image_id;
    std::string session_id;
    Drawing drawing;
    double score_fraction = 0.0;
    game::SessionStatus status = game::SessionStatus::rejected;
};

nlohmann::json to_json(const SubmissionRecord& r);
SubmissionRecord submission_from_json(const nlohmann::json& j);

std::string utc_timestamp_now();

struct LoadedSubmissions {
    std::vector<SubmissionRecord> records;
    std::size_t torn_lines = 0;  // unparsable partial writes that were skipped
};

/// Append-only JSONL store, one record per line. All writes go through one
/// mutex-guarded stream and are flushed per record.
class SubmissionLog {
public:
    explicit SubmissionLog(std::filesystem::path path);

    void append(const SubmissionRecord& r);
    const std::filesystem::path& path() const noexcept { return path_; }

    /// Lines that are not JSON at all are torn writes from a crash (the
    /// last line, or an earlier one sealed when the log was reopened) and
    /// are skipped. Well-formed JSON that is not a valid record throws.
    static LoadedSubmissions load(const std::filesystem::path& path);

private:
    std::filesystem::path path_;
    std::mutex mutex_;
    std::ofstream out_;
};

}  // namespace contour::gateway
