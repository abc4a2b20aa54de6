#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "contour/grid.hpp"
#include "contour/stroke_model.hpp"

namespace contour::game {

struct FieldParams {
    std::size_t n_reward = 50;
    std::size_t n_penalty = 50;
    double collect_radius = 6.0;
    double penalty_radius = 4.0;
    double clearance = 15.0;
    double min_sep = 8.0;
    double reward_value = 1.0;
    double penalty_value = 0.5;
    double boundary_t = 0.5;  // soft boundary maps are thresholded here first

    void validate() const;
};

inline constexpr double kDefaultCutoff = 0.5;

struct RewardPoint {
    Point at;
    double value = 0.0;

    friend bool operator==(const RewardPoint&, const RewardPoint&) = default;
};

/// Hidden scoring targets for one image. Reward points sit on boundary
/// pixels; penalty points sit at least `clearance` away from any boundary.
struct RewardField {
    std::string image_id;
    int width = 0;
    int height = 0;
    std::vector<RewardPoint> rewards;
    std::vector<RewardPoint> penalties;
    double total_reward = 0.0;
    FieldParams params;
    std::uint64_t seed = 0;

    friend bool operator==(const RewardField& a, const RewardField& b) {
        return a.image_id == b.image_id && a.width == b.width && a.height == b.height && a.rewards == b.rewards &&
               a.penalties == b.penalties && a.total_reward == b.total_reward && a.seed == b.seed;
    }
};

RewardField generate_field(const BinaryMap& boundary, const FieldParams& params, std::uint64_t seed,
                           std::string image_id = {});
RewardField generate_field(const SoftMap& boundary, const FieldParams& params, std::uint64_t seed,
                           std::string image_id = {});

enum class SessionStatus { open, accepted, rejected };

struct ScoreEvent {
    enum class Kind { collect, penalty };
    Kind kind = Kind::collect;
    std::size_t index = 0;
    double delta = 0.0;
};

struct SegmentScore {
    double delta = 0.0;
    std::vector<ScoreEvent> events;
};

struct FinalVerdict {
    SessionStatus status = SessionStatus::rejected;
    double score_fraction = 0.0;
};

/// Live scoring state of one drawing round. Not synchronized: callers
/// serialize access to a single session.
class GameSession {
public:
    GameSession(std::string session_id, RewardField field);

    /// Extends the current stroke (or starts a new one) with `points` and
    /// fires every reward/penalty within radius of the new path segments.
    /// The first point of a continued chunk joins the previous chunk's last point.
    SegmentScore score_segment(const std::vector<Point>& points, bool new_stroke = false);

    /// Closes the session: fraction = max(score, 0) / total_reward.
    FinalVerdict finalize(double cutoff = kDefaultCutoff);

    const std::string& id() const noexcept { return id_; }
    const RewardField& field() const noexcept { return field_; }
    double score() const noexcept { return score_; }
    SessionStatus status() const noexcept { return status_; }
    const std::vector<std::size_t>& collected() const noexcept { return collected_order_; }
    const std::vector<std::size_t>& triggered() const noexcept { return triggered_order_; }
    const Drawing& drawing() const noexcept { return drawing_; }

private:
    void test_segment(Point a, Point b, SegmentScore& out);

    std::string id_;
    RewardField field_;
    std::vector<char> collected_;
    std::vector<char> triggered_;
    std::vector<std::size_t> collected_order_;
    std::vector<std::size_t> triggered_order_;
    double score_ = 0.0;
    SessionStatus status_ = SessionStatus::open;
    Drawing drawing_;
    std::optional<Point> last_point_;
};

struct Classification {
    bool accepted = false;
    double fraction = 0.0;
};

/// Replays a finished drawing stroke by stroke through a fresh session.
Classification classify_submission(const Drawing& d, const RewardField& field, double cutoff = kDefaultCutoff);

std::string to_string(SessionStatus s);
std::string to_string(ScoreEvent::Kind k);

// JSON forms. The full field is server-side only; the redacted session
// snapshot and score replies never carry point coordinates.
nlohmann::json field_to_json(const RewardField& field);
RewardField field_from_json(const nlohmann::json& j);
nlohmann::json redacted_snapshot(const GameSession& s);
nlohmann::json score_reply(const SegmentScore& score, const GameSession& s);

}  // namespace contour::game
