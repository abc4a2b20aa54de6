#include <doctest.h>

#include <cstdlib>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "contour/bench.hpp"
#include "contour/gateway/cli.hpp"
#include "contour/gateway/game_service.hpp"
#include "contour/gateway/submission_log.hpp"
#include "contour/raster_ops.hpp"
#include "support/agents.hpp"
#include "support/fixtures.hpp"

using namespace contour;
using namespace contour::gateway;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code = 0;
    std::string out;
    std::string err;
};

CliRun cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    CliRun r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

nlohmann::json stroke_message(const Stroke& s) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : s.points) {
        pts.push_back({p.x, p.y});
    }
    return {{"type", "stroke_points"}, {"points", pts}, {"new_stroke", true}};
}

SubmissionRecord sample_record(const std::string& session) {
    SubmissionRecord r;
    r.timestamp = "2026-01-02T03:04:05Z";
    r.image_id = "img";
    r.session_id = session;
    r.drawing = fixtures::make_drawing("img", 10, 10, {{{1, 1}, {5, 5}}});
    r.score_fraction = 0.75;
    r.status = game::SessionStatus::accepted;
    return r;
}

}  // namespace

TEST_CASE("submission records round-trip") {
    const auto r = sample_record("s1");
    const auto back = submission_from_json(to_json(r));
    CHECK(back.timestamp == r.timestamp);
    CHECK(back.session_id == "s1");
    CHECK(back.drawing == r.drawing);
    CHECK(back.score_fraction == 0.75);
    CHECK(back.status == game::SessionStatus::accepted);
    CHECK_THROWS_AS(submission_from_json(nlohmann::json{{"image_id", "x"}}), ParseError);
    auto bad_status = to_json(r);
    bad_status["status"] = "open";
    CHECK_THROWS_AS(submission_from_json(bad_status), ParseError);

    const auto ts = utc_timestamp_now();
    CHECK(ts.size() == 20);
    CHECK(ts.back() == 'Z');
}

TEST_CASE("submission log survives a torn final line") {
    fixtures::TempDir dir;
    const auto path = dir / "sub/log.jsonl";
    {
        SubmissionLog log(path);
        log.append(sample_record("a"));
        log.append(sample_record("b"));
    }
    // Simulate a crash half-way through the third record.
    const std::string third = to_json(sample_record("c")).dump();
    {
        std::ofstream out(path, std::ios::app);
        out << third.substr(0, third.size() / 2);
    }
    auto loaded = SubmissionLog::load(path);
    CHECK(loaded.records.size() == 2);
    CHECK(loaded.torn_lines == 1);

    // Reopening seals the torn line so new records start on a fresh line.
    {
        SubmissionLog log(path);
        log.append(sample_record("d"));
    }
    loaded = SubmissionLog::load(path);
    REQUIRE(loaded.records.size() == 3);
    CHECK(loaded.records[2].session_id == "d");
    CHECK(loaded.torn_lines == 1);

    CHECK(SubmissionLog::load(dir / "missing.jsonl").records.empty());

    fixtures::write_file(dir / "bad.jsonl", "{\"valid\":\"json\"}\n");
    CHECK_THROWS_AS(SubmissionLog::load(dir / "bad.jsonl"), ParseError);
}

TEST_CASE("concurrent appends stay line-atomic") {
    fixtures::TempDir dir;
    const auto path = dir / "log.jsonl";
    {
        SubmissionLog log(path);
        std::vector<std::thread> threads;
        for (int t = 0; t < 8; ++t) {
            threads.emplace_back([&, t] {
                for (int k = 0; k < 25; ++k) {
                    log.append(sample_record("t" + std::to_string(t) + "-" + std::to_string(k)));
                }
            });
        }
        for (auto& th : threads) {
            th.join();
        }
    }
    const auto loaded = SubmissionLog::load(path);
    CHECK(loaded.records.size() == 200);
    CHECK(loaded.torn_lines == 0);
}

TEST_CASE("game service round") {
    fixtures::TempDir dir;
    const auto scene = agents::random_scene(3);
    fixtures::write_dataset_image(dir.path(), {scene});
    ServiceConfig cfg;
    cfg.dataset_root = dir.path();
    GameService svc(cfg);

    CHECK(svc.health()["status"] == "ok");
    const auto next = svc.next_image();
    CHECK(next["image_id"] == scene.image_id);
    CHECK(next["image_url"] == "/images/" + scene.image_id);
    CHECK(svc.image_file(scene.image_id).has_value());

    const auto opened = svc.open_session({{"image_id", scene.image_id}});
    const std::string id = opened["session_id"];
    CHECK(opened["width"] == scene.width);
    CHECK(opened["height"] == scene.height);

    double score = 0.0;
    for (const auto& s : agents::tracer(scene, 3).strokes) {
        const auto reply = svc.stroke(id, stroke_message(s));
        CHECK(reply["type"] == "score");
        score = reply["score"];
    }
    CHECK(score > 0.0);
    const auto snap = svc.session_snapshot(id);
    CHECK(snap["score"] == score);
    CHECK(snap.dump().find("\"x\"") == std::string::npos);

    const auto verdict = svc.submit(id);
    CHECK(verdict["status"] == "accepted");
    CHECK(verdict["score_fraction"].get<double>() >= 0.5);

    try {
        svc.submit(id);
        FAIL("second submit must fail");
    } catch (const ServiceError& e) {
        CHECK(e.status() == 409);
    }

    const std::string empty_id = svc.open_session({{"image_id", scene.image_id}})["session_id"];
    CHECK(empty_id != id);
    CHECK(svc.submit(empty_id)["status"] == "rejected");

    const auto loaded = SubmissionLog::load(dir / "submissions/submissions.jsonl");
    REQUIRE(loaded.records.size() == 2);
    CHECK(loaded.records[0].status == game::SessionStatus::accepted);
    CHECK(loaded.records[0].drawing.strokes.size() == scene.strokes.size());
    CHECK(loaded.records[1].drawing.strokes.empty());
}

TEST_CASE("game service errors") {
    fixtures::TempDir dir;
    fixtures::write_dataset_image(dir.path(), {agents::random_scene(5)});
    ServiceConfig cfg;
    cfg.dataset_root = dir.path();
    GameService svc(cfg);

    auto status_of = [](auto&& fn) {
        try {
            fn();
        } catch (const ServiceError& e) {
            return e.status();
        }
        return 0;
    };
    CHECK(status_of([&] { svc.open_session({{"image_id", "nope"}}); }) == 404);
    CHECK(status_of([&] { svc.open_session(nlohmann::json::object()); }) == 400);
    CHECK(status_of([&] { svc.session_snapshot("missing"); }) == 404);
    const std::string id = svc.open_session({{"image_id", "scene5"}})["session_id"];
    CHECK(status_of([&] { svc.stroke(id, {{"type", "other"}, {"points", {{1, 2}}}}); }) == 400);
    CHECK(status_of([&] { svc.stroke(id, {{"type", "stroke_points"}, {"points", {{1}}}}); }) == 400);
    CHECK(status_of([&] { svc.stroke(id, {{"type", "stroke_points"}, {"points", nlohmann::json::array()}}); }) ==
          400);
    svc.submit(id);
    CHECK(status_of([&] { svc.stroke(id, {{"type", "stroke_points"}, {"points", {{1, 2}}}}); }) == 409);

    fixtures::TempDir empty;
    ServiceConfig bad;
    bad.dataset_root = empty.path();
    CHECK_THROWS_AS(GameService{bad}, Error);
}

TEST_CASE("sessions on one image are independent") {
    fixtures::TempDir dir;
    const auto scene = agents::random_scene(8);
    fixtures::write_dataset_image(dir.path(), {scene});
    ServiceConfig cfg;
    cfg.dataset_root = dir.path();
    GameService svc(cfg);
    const std::string a = svc.open_session({{"image_id", scene.image_id}})["session_id"];
    const std::string b = svc.open_session({{"image_id", scene.image_id}})["session_id"];
    for (const auto& s : agents::tracer(scene, 1).strokes) {
        svc.stroke(a, stroke_message(s));
    }
    CHECK(svc.session_snapshot(a)["score"].get<double>() > 0.0);
    CHECK(svc.session_snapshot(b)["score"].get<double>() == 0.0);
    CHECK(svc.session_snapshot(b)["n_strokes"] == 0);
}

TEST_CASE("submitted drawings drop single-point strokes") {
    game::RewardField f;
    f.image_id = "m";
    f.width = 20;
    f.height = 20;
    f.rewards.push_back({{5, 5}, 1.0});
    f.total_reward = 1.0;
    game::GameSession s("s", f);
    s.score_segment({{1, 1}}, true);
    s.score_segment({{2, 2}, {8, 8}}, true);
    const auto d = submitted_drawing(s);
    REQUIRE(d.strokes.size() == 1);
    CHECK(d.strokes[0].order_index == 0);
}

TEST_CASE("cli: help, unknown commands and bad flags") {
    CHECK(cli({"--help"}).code == 0);
    CHECK(cli({"frobnicate"}).code != 0);
    CHECK(cli({"toy-train", "--mode", "median"}).code != 0);
    const auto missing = cli({"rasterize", "/nonexistent.json", "-o", "/tmp/x.png"});
    CHECK(missing.code != 0);
    CHECK(missing.err.find("error") != std::string::npos);
}

TEST_CASE("cli: import-svg, rasterize and stats") {
    fixtures::TempDir dir;
    fixtures::write_file(dir / "a.svg",
                         R"(<svg width="32" height="24"><path d="M 2 2 L 30 2"/><polyline points="2,20 16,4 30,20"/></svg>)");
    auto r = cli({"import-svg", (dir / "a.svg").string(), "-o", (dir / "a.json").string()});
    REQUIRE(r.code == 0);
    const auto d = load_drawing(dir / "a.json");
    CHECK(d.image_id == "a");
    CHECK(d.strokes.size() == 2);

    r = cli({"rasterize", (dir / "a.json").string(), "-o", (dir / "a.png").string()});
    REQUIRE(r.code == 0);
    CHECK(load_binary_map_png(dir / "a.png") == rasterize_drawing(d));

    r = cli({"stats", (dir / "a.json").string()});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["n_drawings"] == 1);
    CHECK(j["mean_strokes"] == 2.0);
    CHECK(j["mean_control_points"] == 5.0);
}

TEST_CASE("cli: consensus on identical drawings keeps every stroke") {
    fixtures::TempDir dir;
    const auto d = agents::random_scene(2, 96, 96);
    fixtures::write_dataset_image(dir.path(), std::vector<Drawing>(5, d));
    const auto r = cli({"consensus", "--image", d.image_id, "--data", dir.path().string()});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["image_id"] == d.image_id);
    CHECK(j["kept"].size() == 5);
    for (const auto& k : j["kept"]) {
        CHECK(k.size() == d.strokes.size());
    }
    CHECK(parse_drawing(j["consensus_drawing"].dump()) == d);
}

TEST_CASE("cli: eval on the perfect-prediction fixture") {
    fixtures::TempDir dir;
    const auto gt_root = dir / "gt";
    const auto pred_root = dir / "pred";
    fs::create_directories(pred_root);
    // Separated straight strokes rasterize to thinning-stable lines, so the
    // soft pipeline reproduces the ground truth exactly.
    for (int k = 0; k < 3; ++k) {
        const double o = 4.0 * k;
        const auto scene = fixtures::make_drawing("img" + std::to_string(k), 96, 80,
                                                  {{{5, 5 + o}, {90, 20 + o}}, {{10, 40}, {30, 75 - o}}, {{50, 70}, {92, 35 + o}}});
        fixtures::write_dataset_image(gt_root, {scene, scene});
        save_soft_map_png(SoftMap::from_binary(rasterize_drawing(scene)), pred_root / (scene.image_id + ".png"));
    }
    const auto r = cli({"eval", "--pred", pred_root.string(), "--gt", gt_root.string(), "--csv",
                        (dir / "pr.csv").string(), "--threads", "2"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["ods"]["f1"] == 1.0);
    CHECK(j["ois"]["f1"] == 1.0);
    CHECK(j["per_image"].size() == 3);
    CHECK(fixtures::read_file(dir / "pr.csv").find("*,0.5,") != std::string::npos);

    // Vector predictions take the single-threshold path.
    const auto vec_root = dir / "vec";
    fs::create_directories(vec_root);
    for (const auto& id : Dataset(gt_root).image_ids()) {
        save_drawing(Dataset(gt_root).drawings(id).front(), vec_root / (id + ".json"));
    }
    const auto v = cli({"eval", "--pred", vec_root.string(), "--gt", gt_root.string()});
    REQUIRE(v.code == 0);
    CHECK(nlohmann::json::parse(v.out)["ods"]["f1"] == 1.0);

    CHECK(cli({"eval", "--pred", (dir / "nothing").string(), "--gt", gt_root.string()}).code != 0);
}

TEST_CASE("cli: toy-train") {
    const auto r = cli({"toy-train", "--mode", "min"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["final_min_l1"].get<double>() <= 0.02);
    CHECK(j["on_pixels_at_0.5"] == 10);

    const auto m = nlohmann::json::parse(cli({"toy-train", "--mode", "mean"}).out);
    CHECK(m["on_pixels_at_0.5"] == 0);
}

TEST_CASE("cli: game-field and classify") {
    fixtures::TempDir dir;
    const auto scene = agents::random_scene(6);
    save_drawing(scene, dir / "scene.json");
    save_drawing(agents::tracer(scene, 6), dir / "trace.json");
    save_drawing(agents::scribbler(scene.width, scene.height, 6), dir / "scribble.json");

    auto r = cli({"game-field", "--drawing", (dir / "scene.json").string(), "--seed", "4", "-o",
                  (dir / "field.json").string()});
    REQUIRE(r.code == 0);
    const auto field = game::field_from_json(nlohmann::json::parse(fixtures::read_file(dir / "field.json")));
    CHECK(field.rewards.size() == 50);
    CHECK(field.image_id == scene.image_id);

    save_binary_map_png(rasterize_drawing(scene), dir / "b.png");
    r = cli({"game-field", "--boundary", (dir / "b.png").string(), "--seed", "4", "--image-id", scene.image_id});
    REQUIRE(r.code == 0);
    CHECK(game::field_from_json(nlohmann::json::parse(r.out)) == field);

    r = cli({"classify", "--drawing", (dir / "trace.json").string(), "--field", (dir / "field.json").string()});
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["status"] == "accepted");
    r = cli({"classify", "--drawing", (dir / "scribble.json").string(), "--field", (dir / "field.json").string()});
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["status"] == "rejected");

    CHECK(cli({"game-field", "--seed", "1"}).code != 0);
}

TEST_CASE("cli: data root falls back to the environment") {
    fixtures::TempDir dir;
    const auto d = agents::random_scene(9, 64, 64);
    fixtures::write_dataset_image(dir.path(), {d, d});
    ::setenv("CONTOURBENCH_DATA", dir.path().c_str(), 1);
    const auto r = cli({"consensus", "--image", d.image_id});
    ::unsetenv("CONTOURBENCH_DATA");
    CHECK(r.code == 0);
}
