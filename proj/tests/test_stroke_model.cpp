#include <doctest.h>

#include <set>

#include "contour/stroke_model.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace contour;

namespace {

std::set<Pixel> on_pixels(const BinaryMap& m) {
    auto v = m.pixels();
    return {v.begin(), v.end()};
}

}  // namespace

TEST_CASE("parse minimal drawing") {
    const auto d = parse_drawing(
        R"({"image_id":"a","width":10,"height":10,"strokes":[{"points":[[1,1],[2,3]],"order_index":0}]})");
    REQUIRE(d.strokes.size() == 1);
    CHECK(d.strokes[0].points.size() == 2);
    CHECK(d.strokes[0].points[1] == Point{2, 3});
    CHECK_FALSE(d.annotator_id.has_value());
}

TEST_CASE("points are clamped into the image") {
    const auto d = parse_drawing(
        R"({"image_id":"a","width":100,"height":100,"strokes":[{"points":[[-3,5],[50,150]],"order_index":0}]})");
    CHECK(d.strokes[0].points[0] == Point{0, 5});
    CHECK(d.strokes[0].points[1] == Point{50, 100});
}

TEST_CASE("strokes are sorted by order_index") {
    const auto d = parse_drawing(R"({"image_id":"a","width":10,"height":10,"strokes":[
        {"points":[[0,0],[1,0]],"order_index":2},
        {"points":[[0,1],[1,1]],"order_index":0},
        {"points":[[0,2],[1,2]],"order_index":1}]})");
    REQUIRE(d.strokes.size() == 3);
    CHECK(d.strokes[0].order_index == 0);
    CHECK(d.strokes[1].order_index == 1);
    CHECK(d.strokes[2].order_index == 2);
    CHECK(d.strokes[0].points[0].y == 1);
}

TEST_CASE("malformed drawings are rejected") {
    CHECK_THROWS_AS(parse_drawing("{"), ParseError);
    CHECK_THROWS_AS(parse_drawing(R"({"image_id":"a","width":0,"height":10,"strokes":[]})"), ParseError);
    CHECK_THROWS_AS(
        parse_drawing(R"({"image_id":"a","width":10,"height":10,"strokes":[{"points":[[1,1]],"order_index":0}]})"),
        ParseError);
    CHECK_THROWS_AS(parse_drawing(
                        R"({"image_id":"a","width":10,"height":10,"strokes":[{"points":[[1,1],[1,1]],"order_index":0}]})"),
                    ParseError);
    CHECK_THROWS_AS(parse_drawing(R"({"image_id":"a","width":10,"height":10,"strokes":[
        {"points":[[0,0],[1,0]],"order_index":1},{"points":[[0,1],[1,1]],"order_index":1}]})"),
                    ParseError);
    CHECK_THROWS_AS(parse_drawing(R"({"width":10,"height":10,"strokes":[]})"), ParseError);
}

TEST_CASE("serialization is canonical and round-trips") {
    auto d = fixtures::make_drawing("img", 20, 10, {{{0, 0}, {10.5, 3.25}}, {{1, 1}, {2, 2}, {3, 1}}}, "ann");
    const auto text = serialize_drawing(d);
    CHECK(text == serialize_drawing(d));
    CHECK(parse_drawing(text) == d);
    CHECK(text.find("\"image_id\"") < text.find("\"width\""));
    CHECK(text.find("\"annotator_id\"") < text.find("\"strokes\""));

    Drawing empty;
    empty.image_id = "e";
    empty.width = 5;
    empty.height = 5;
    CHECK(serialize_drawing(empty).find("\"strokes\":[]") != std::string::npos);
}

TEST_CASE("svg path and polyline import") {
    const auto line = import_svg(R"(<svg width="20" height="20"><path d="M 0 0 L 10 0"/></svg>)", "s");
    REQUIRE(line.strokes.size() == 1);
    CHECK(line.strokes[0].points == std::vector<Point>{{0, 0}, {10, 0}});

    const auto poly = import_svg(R"(<svg width="20" height="20"><polyline points="0,0 5,5 10,0"/></svg>)", "s");
    REQUIRE(poly.strokes.size() == 1);
    CHECK(poly.strokes[0].points.size() == 3);

    const auto rel = import_svg(R"(<svg width="20px" height="20"><path d="m 1 1 l 2 0 3 4"/></svg>)", "s");
    REQUIRE(rel.strokes.size() == 1);
    CHECK(rel.strokes[0].points == std::vector<Point>{{1, 1}, {3, 1}, {6, 5}});
}

TEST_CASE("cubic flattening stays within tolerance of the exact curve") {
    for (double tol : {0.25, 0.05, 1.0}) {
        const auto d = import_svg(R"(<svg width="20" height="20"><path d="M 0 0 C 0 10 10 10 10 0"/></svg>)", "s", tol);
        REQUIRE(d.strokes.size() == 1);
        const auto& poly = d.strokes[0].points;
        CHECK(poly.front() == Point{0, 0});
        CHECK(poly.back() == Point{10, 0});
        const auto dense = oracle::sample_cubic({0, 0}, {0, 10}, {10, 10}, {10, 0}, 1000);
        CHECK(oracle::max_distance_to_polyline(dense, poly) <= tol);
    }
}

TEST_CASE("svg without dimensions is rejected") {
    CHECK_THROWS_AS(import_svg(R"(<svg><path d="M 0 0 L 1 1"/></svg>)", "s"), ParseError);
    CHECK_THROWS_AS(import_svg("not xml <", "s"), ParseError);
}

TEST_CASE("resampling") {
    const Stroke seg{{{0, 0}, {10, 0}}, 0};
    CHECK(resample_stroke(seg, 5).points == std::vector<Point>{{0, 0}, {5, 0}, {10, 0}});
    CHECK(resample_stroke(seg, 10).points == std::vector<Point>{{0, 0}, {10, 0}});
    CHECK(resample_stroke(seg, 50).points == std::vector<Point>{{0, 0}, {10, 0}});

    const Stroke ell{{{0, 0}, {4, 0}, {4, 3}}, 0};
    const auto r = resample_stroke(ell, 1).points;
    const auto walk = oracle::arc_length_walk(ell.points, 1.0);
    REQUIRE(r.size() == 8);
    REQUIRE(walk.size() == r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        CHECK(r[i].x == doctest::Approx(walk[i].x));
        CHECK(r[i].y == doctest::Approx(walk[i].y));
    }
    CHECK(std::find(r.begin(), r.end(), Point{4, 0}) != r.end());
    CHECK(stroke_length(ell) == doctest::Approx(7.0));
}

TEST_CASE("rasterize axis-aligned and empty drawings") {
    const auto d = fixtures::make_drawing("r", 8, 8, {{{0, 0}, {3, 0}}});
    CHECK(on_pixels(rasterize_drawing(d)) == std::set<Pixel>{{0, 0}, {1, 0}, {2, 0}, {3, 0}});

    Drawing empty;
    empty.image_id = "e";
    empty.width = 4;
    empty.height = 3;
    const auto m = rasterize_drawing(empty);
    CHECK(m.width() == 4);
    CHECK(m.height() == 3);
    CHECK(m.count() == 0);

    const auto scaled = rasterize_drawing(d, 0.5);
    CHECK(scaled.width() == 4);
}

TEST_CASE("digital lines equal the dense-sampling oracle") {
    const auto line = digital_line({0, 0}, {3, 2});
    const auto ref = oracle::dense_sampled_line({0, 0}, {3, 2});
    CHECK(std::set<Pixel>(line.begin(), line.end()).size() == line.size());
    if (!ref.has_tie) {
        CHECK(std::set<Pixel>(line.begin(), line.end()) == ref.pixels);
    }

    std::size_t compared = 0;
    for (int ax = 0; ax < 7; ++ax) {
        for (int ay = 0; ay < 7; ++ay) {
            for (int bx = 0; bx < 7; ++bx) {
                for (int by = 0; by < 7; ++by) {
                    const Pixel a{ax, ay}, b{bx, by};
                    const auto px = digital_line(a, b);
                    const std::set<Pixel> got(px.begin(), px.end());
                    const auto want = oracle::dense_sampled_line(a, b);
                    CHECK(px.front() == a);
                    CHECK(px.back() == b);
                    // 8-connected, one pixel per step along the major axis.
                    for (std::size_t i = 1; i < px.size(); ++i) {
                        CHECK(std::max(std::abs(px[i].x - px[i - 1].x), std::abs(px[i].y - px[i - 1].y)) == 1);
                    }
                    if (!want.has_tie) {
                        CHECK(got == want.pixels);
                        ++compared;
                    }
                }
            }
        }
    }
    CHECK(compared > 1000);
}

TEST_CASE("drawing statistics") {
    const auto one = fixtures::make_drawing("s", 10, 10, {{{0, 0}, {1, 0}, {2, 0}}, {{0, 1}, {1, 1}, {2, 2}}});
    auto s = drawing_stats({one});
    CHECK(s.n_drawings == 1);
    CHECK(s.mean_strokes == 2.0);
    CHECK(s.mean_control_points == 6.0);

    const auto a = fixtures::make_drawing("s", 10, 10, {{{0, 0}, {1, 0}}});
    const auto b = fixtures::make_drawing("s", 10, 10, {{{0, 0}, {1, 0}}, {{0, 1}, {1, 1}}, {{0, 2}, {1, 2}}});
    CHECK(drawing_stats({a, b}).mean_strokes == 2.0);
    CHECK_THROWS_AS(drawing_stats({}), std::invalid_argument);
}

TEST_CASE("dataset layout") {
    fixtures::TempDir dir;
    const auto d0 = fixtures::make_drawing("img1", 10, 10, {{{0, 0}, {5, 5}}}, "a");
    const auto d1 = fixtures::make_drawing("img1", 10, 10, {{{0, 5}, {5, 5}}}, "b");
    fixtures::write_dataset_image(dir.path(), {d0, d1});
    // A tenth drawing must sort after the second, not between.
    save_drawing(d1, dir / "drawings/img1/10.json");
    fixtures::write_dataset_image(dir.path(), {fixtures::make_drawing("img0", 10, 10, {{{1, 1}, {2, 2}}})});

    Dataset ds(dir.path());
    CHECK(ds.image_ids() == std::vector<std::string>{"img0", "img1"});
    const auto drawings = ds.drawings("img1");
    REQUIRE(drawings.size() == 3);
    CHECK(drawings[0] == d0);
    CHECK(drawings[1] == d1);
    CHECK(ds.image_path("img1").has_value());
    CHECK_FALSE(ds.image_path("nope").has_value());
    CHECK(load_drawing(dir / "drawings/img1/0.json") == d0);
}
