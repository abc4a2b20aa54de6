#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "contour/game_engine.hpp"
#include "contour/gateway/submission_log.hpp"

namespace contour::gateway {

struct ServiceConfig {
    std::filesystem::path dataset_root;
    std::string host = "127.0.0.1";
    unsigned short port = 8080;
    game::FieldParams params;
    double cutoff = game::kDefaultCutoff;
    std::uint64_t seed = 0;
};

/// Request failure that maps onto an HTTP status.
class ServiceError : public Error {
public:
    ServiceError(int status, const std::string& message) : Error(message), status_(status) {}
    int status() const noexcept { return status_; }

private:
    int status_;
};

/// Transport-independent game backend. Boundary maps come from
/// <root>/fields_src/<image_id>.png; submissions go to
/// <root>/submissions/submissions.jsonl. Thread-safe; each session is
/// guarded by its own mutex so messages for one session are serialized.
class GameService {
public:
    explicit GameService(ServiceConfig cfg);

    const ServiceConfig& config() const noexcept { return cfg_; }
    const std::vector<std::string>& image_ids() const noexcept { return image_ids_; }

    nlohmann::json health() const;
    /// {image_id, image_url}; cycles through the available images.
    nlohmann::json next_image();
    /// Body {image_id} -> {session_id, width, height}.
    nlohmann::json open_session(const nlohmann::json& body);
    /// Redacted snapshot: score and counts, never point coordinates.
    nlohmann::json session_snapshot(const std::string& session_id);
    /// {type:"stroke_points", points:[[x,y],...], new_stroke?:bool} -> score reply.
    nlohmann::json stroke(const std::string& session_id, const nlohmann::json& message);
    /// Finalizes, persists the record and returns {status, score_fraction}.
    nlohmann::json submit(const std::string& session_id);

    std::optional<std::filesystem::path> image_file(const std::string& image_id) const;

    SubmissionLog& log() noexcept { return log_; }

private:
    struct Entry {
        std::mutex mutex;
        game::GameSession session;
        explicit Entry(game::GameSession s) : session(std::move(s)) {}
    };

    std::shared_ptr<Entry> find(const std::string& session_id);
    const BinaryMap& boundary(const std::string& image_id);
    std::string fresh_session_id();

    ServiceConfig cfg_;
    std::vector<std::string> image_ids_;
    SubmissionLog log_;

    std::mutex mutex_;  // guards everything below
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
    std::map<std::string, BinaryMap> boundaries_;
    std::size_t next_image_ = 0;
    std::uint64_t session_counter_ = 0;
};

/// The session's strokes with degenerate (single-point) strokes removed,
/// satisfying the Drawing invariants.
Drawing submitted_drawing(const game::GameSession& s);

}  // namespace contour::gateway
