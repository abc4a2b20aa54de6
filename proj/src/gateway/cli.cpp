#include "contour/gateway/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "contour/bench.hpp"
#include "contour/consensus.hpp"
#include "contour/game_engine.hpp"
#include "contour/gateway/game_service.hpp"
#include "contour/gateway/http_server.hpp"
#include "contour/mm_loss.hpp"
#include "contour/raster_ops.hpp"

namespace contour::gateway {

namespace {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
    if (out_path.empty() || out_path == "-") {
        out << text << '\n';
        return;
    }
    const fs::path p(out_path);
    if (p.has_parent_path()) {
        fs::create_directories(p.parent_path());
    }
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw Error("cannot write " + out_path);
    }
    f << text << '\n';
}

std::string default_data_root() {
    if (const char* env = std::getenv("CONTOURBENCH_DATA"); env != nullptr && *env != '\0') {
        return env;
    }
    return "data";
}

void add_field_params(CLI::App* cmd, game::FieldParams& p) {
    cmd->add_option("--n-reward", p.n_reward, "Reward points per field")->capture_default_str();
    cmd->add_option("--n-penalty", p.n_penalty, "Penalty points per field")->capture_default_str();
    cmd->add_option("--collect-radius", p.collect_radius, "Reward collection radius (px)")->capture_default_str();
    cmd->add_option("--penalty-radius", p.penalty_radius, "Penalty trigger radius (px)")->capture_default_str();
    cmd->add_option("--clearance", p.clearance, "Minimum penalty distance from boundaries (px)")
        ->capture_default_str();
    cmd->add_option("--min-sep", p.min_sep, "Minimum spacing between reward points (px)")->capture_default_str();
    cmd->add_option("--reward-value", p.reward_value)->capture_default_str();
    cmd->add_option("--penalty-value", p.penalty_value)->capture_default_str();
    cmd->add_option("--boundary-t", p.boundary_t, "Threshold applied to soft boundary maps")
        ->capture_default_str();
}

std::vector<Drawing> collect_drawings(const std::vector<std::string>& inputs) {
    std::vector<fs::path> files;
    for (const auto& in : inputs) {
        const fs::path p(in);
        if (fs::is_directory(p)) {
            for (const auto& e : fs::recursive_directory_iterator(p)) {
                if (e.is_regular_file() && e.path().extension() == ".json") {
                    files.push_back(e.path());
                }
            }
        } else {
            files.push_back(p);
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<Drawing> out;
    out.reserve(files.size());
    for (const auto& f : files) {
        out.push_back(load_drawing(f));
    }
    return out;
}

Drawing ground_truth_for(const Dataset& ds, const std::string& image_id, double tol_frac, double rho) {
    auto drawings = ds.drawings(image_id);
    if (drawings.empty()) {
        throw Error("image " + image_id + " has no drawings");
    }
    if (drawings.size() == 1) {
        return drawings.front();
    }
    const auto tol = Tolerance::from_diagonal(drawings.front().width, drawings.front().height, tol_frac);
    ConsensusOptions opts;
    opts.rho = rho;
    return consensus_drawings(drawings, tol, opts).consensus_drawing;
}

nlohmann::json consensus_json(const ConsensusResult& r) {
    nlohmann::ordered_json doc;
    doc["image_id"] = r.consensus_drawing.image_id;
    doc["kept"] = r.kept;
    doc["per_stroke_fractions"] = r.per_stroke_fractions;
    doc["consensus_drawing"] = nlohmann::ordered_json::parse(serialize_drawing(r.consensus_drawing));
    return doc;
}

struct EvalArgs {
    std::string pred_dir;
    std::string gt_dir;
    double tol_frac = Tolerance::kDefaultDiagonalFraction;
    double rho = 0.75;
    bool no_thin = false;
    bool no_nms = false;
    std::string out;
    std::string csv;
    unsigned threads = 0;
};

EvalSummary run_eval(const EvalArgs& a) {
    const Dataset ds(a.gt_dir);
    const auto ids = ds.image_ids();
    if (ids.empty()) {
        throw Error("ground-truth dataset " + a.gt_dir + " has no images");
    }
    EvalOptions opts;
    opts.apply_thinning = !a.no_thin;
    opts.apply_nms = !a.no_nms;
    const auto thresholds = default_thresholds();

    enum class Kind { none, soft, vector };
    Kind kind = Kind::none;
    for (const auto& id : ids) {
        const bool png = fs::exists(fs::path(a.pred_dir) / (id + ".png"));
        const bool json = fs::exists(fs::path(a.pred_dir) / (id + ".json"));
        if (!png && !json) {
            throw Error("no prediction for image " + id + " in " + a.pred_dir);
        }
        const Kind k = png ? Kind::soft : Kind::vector;
        if (kind != Kind::none && k != kind) {
            throw Error("prediction directory mixes PNG and drawing predictions");
        }
        kind = k;
    }

    auto evaluate_one = [&](const std::string& id) {
        const Drawing gt = ground_truth_for(ds, id, a.tol_frac, a.rho);
        const auto tol = Tolerance::from_diagonal(gt.width, gt.height, a.tol_frac);
        if (kind == Kind::soft) {
            return evaluate_prediction(load_soft_map_png(fs::path(a.pred_dir) / (id + ".png")), gt, tol, thresholds,
                                       opts);
        }
        return evaluate_prediction(load_drawing(fs::path(a.pred_dir) / (id + ".json")), gt, tol);
    };

    const unsigned workers = std::max(1u, a.threads != 0 ? a.threads : std::thread::hardware_concurrency());
    std::vector<ImageEval> evals(ids.size());
    for (std::size_t begin = 0; begin < ids.size(); begin += workers) {
        std::vector<std::future<ImageEval>> batch;
        const std::size_t end = std::min(ids.size(), begin + workers);
        for (std::size_t i = begin; i < end; ++i) {
            batch.push_back(std::async(std::launch::async, evaluate_one, ids[i]));
        }
        for (std::size_t i = begin; i < end; ++i) {
            evals[i] = batch[i - begin].get();
        }
    }
    return aggregate(evals);
}

struct ToyArgs {
    std::string mode = "min";
    std::size_t steps = 2000;
    double lr = 50.0;
    std::uint64_t seed = 0;
    std::string out;
    std::string png_dir;
};

nlohmann::ordered_json run_toy(const ToyArgs& a) {
    mm::TrainOptions opts;
    opts.mode = mm::parse_aggregation(a.mode);
    opts.steps = a.steps;
    opts.learning_rate = a.lr;
    opts.seed = a.seed;
    const auto targets = mm::three_line_fixture();
    const auto model = mm::train_toy({{0, targets}}, opts);
    const RealGrid pred = model.predict(0);

    std::vector<double> l1;
    for (const auto& y : targets.targets()) {
        l1.push_back(mm::l1_term(pred, y));
    }
    nlohmann::ordered_json report;
    report["mode"] = a.mode;
    report["final_min_l1"] = *std::min_element(l1.begin(), l1.end());
    report["per_target_l1"] = l1;
    report["steps"] = a.steps;

    const SoftMap soft(pred.width(), pred.height(), std::vector<double>(pred.values().begin(), pred.values().end()));
    const BinaryMap bin = threshold(soft, 0.5);
    report["on_pixels_at_0.5"] = bin.count();
    if (!a.png_dir.empty()) {
        save_soft_map_png(soft, fs::path(a.png_dir) / ("prediction_" + a.mode + ".png"));
        save_binary_map_png(bin, fs::path(a.png_dir) / ("prediction_" + a.mode + "_t0.5.png"));
    }
    return report;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Contour drawing toolkit: stroke data, consensus, benchmark, MM-loss toy trainer, drawing game"};
    app.name("contourbench");
    app.require_subcommand(1);
    std::string data_root = default_data_root();

    // import-svg
    auto* import_cmd = app.add_subcommand("import-svg", "Convert an SVG drawing to canonical drawing JSON");
    std::string svg_in;
    std::string svg_id;
    std::string svg_out;
    double flatten_tol = kDefaultFlattenTolerance;
    import_cmd->add_option("input", svg_in, "SVG file")->required();
    import_cmd->add_option("--image-id", svg_id, "Image id (default: file stem)");
    import_cmd->add_option("--flatten-tol", flatten_tol, "Bezier flattening tolerance (px)")->capture_default_str();
    import_cmd->add_option("-o,--out", svg_out, "Output path (default: stdout)");

    // rasterize
    auto* raster_cmd = app.add_subcommand("rasterize", "Rasterize a drawing to a binary PNG");
    std::string raster_in;
    std::string raster_out;
    double scale = 1.0;
    raster_cmd->add_option("input", raster_in, "Drawing JSON")->required();
    raster_cmd->add_option("--scale", scale)->capture_default_str();
    raster_cmd->add_option("-o,--out", raster_out, "Output PNG")->required();

    // stats
    auto* stats_cmd = app.add_subcommand("stats", "Stroke and control-point statistics");
    std::vector<std::string> stats_in;
    stats_cmd->add_option("inputs", stats_in, "Drawing files or directories (default: <data>/drawings)");
    stats_cmd->add_option("--data", data_root, "Dataset root")->capture_default_str();

    // consensus
    auto* consensus_cmd = app.add_subcommand("consensus", "Stroke-level consensus of one image's drawings");
    std::string cons_image;
    double cons_rho = 0.75;
    double cons_tol = Tolerance::kDefaultDiagonalFraction;
    std::size_t cons_ref = 0;
    bool cons_union = false;
    bool cons_single_pass = false;
    std::string cons_out;
    std::string cons_drawing_out;
    consensus_cmd->add_option("--image", cons_image, "Image id")->required();
    consensus_cmd->add_option("--data", data_root, "Dataset root")->capture_default_str();
    consensus_cmd->add_option("--rho", cons_rho, "Per-stroke match fraction required")->capture_default_str();
    consensus_cmd->add_option("--tol-frac", cons_tol, "Offset tolerance as a fraction of the diagonal")
        ->capture_default_str();
    consensus_cmd->add_option("--reference", cons_ref, "Reference drawing index")->capture_default_str();
    consensus_cmd->add_flag("--union", cons_union, "Union of kept strokes of all drawings");
    consensus_cmd->add_flag("--single-pass", cons_single_pass, "Test once against the full peer drawings");
    consensus_cmd->add_option("-o,--out", cons_out, "Result JSON (default: stdout)");
    consensus_cmd->add_option("--drawing-out", cons_drawing_out, "Also write the consensus drawing here");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Benchmark predictions against consensus ground truth");
    EvalArgs eval_args;
    eval_cmd->add_option("--pred", eval_args.pred_dir, "Directory of <image_id>.png or <image_id>.json")
        ->required();
    eval_cmd->add_option("--gt", eval_args.gt_dir, "Dataset root with drawings/<image_id>/")->required();
    eval_cmd->add_option("--tol-frac", eval_args.tol_frac)->capture_default_str();
    eval_cmd->add_option("--rho", eval_args.rho, "Consensus rho")->capture_default_str();
    eval_cmd->add_flag("--no-thin", eval_args.no_thin, "Skip thinning of binarized predictions");
    eval_cmd->add_flag("--no-nms", eval_args.no_nms, "Skip non-maximum suppression");
    eval_cmd->add_option("-o,--out", eval_args.out, "Summary JSON (default: stdout)");
    eval_cmd->add_option("--csv", eval_args.csv, "Per-threshold precision/recall CSV");
    eval_cmd->add_option("--threads", eval_args.threads, "Worker threads (0 = hardware)");

    // toy-train
    auto* toy_cmd = app.add_subcommand("toy-train", "Train the per-pixel toy model on the three-line fixture");
    ToyArgs toy;
    toy_cmd->add_option("--mode", toy.mode, "min or mean")->check(CLI::IsMember({"min", "mean"}))
        ->capture_default_str();
    toy_cmd->add_option("--steps", toy.steps)->capture_default_str();
    toy_cmd->add_option("--lr", toy.lr)->capture_default_str();
    toy_cmd->add_option("--seed", toy.seed)->capture_default_str();
    toy_cmd->add_option("-o,--out", toy.out, "Report JSON (default: stdout)");
    toy_cmd->add_option("--png-dir", toy.png_dir, "Write prediction PNGs here");

    // game-field
    auto* field_cmd = app.add_subcommand("game-field", "Sample a hidden reward/penalty field");
    std::string field_boundary;
    std::string field_drawing;
    std::string field_image;
    std::uint64_t field_seed = 0;
    std::string field_out;
    game::FieldParams field_params;
    auto* boundary_opt = field_cmd->add_option("--boundary", field_boundary, "Boundary map PNG");
    auto* drawing_opt = field_cmd->add_option("--drawing", field_drawing, "Drawing JSON used as boundary");
    boundary_opt->excludes(drawing_opt);
    field_cmd->add_option("--image-id", field_image);
    field_cmd->add_option("--seed", field_seed)->capture_default_str();
    field_cmd->add_option("-o,--out", field_out, "Field JSON (default: stdout)");
    add_field_params(field_cmd, field_params);

    // classify
    auto* classify_cmd = app.add_subcommand("classify", "Replay a drawing through a reward field");
    std::string cls_drawing;
    std::string cls_field;
    double cls_cutoff = game::kDefaultCutoff;
    classify_cmd->add_option("--drawing", cls_drawing)->required();
    classify_cmd->add_option("--field", cls_field)->required();
    classify_cmd->add_option("--cutoff", cls_cutoff)->capture_default_str();

    // serve
    auto* serve_cmd = app.add_subcommand("serve", "Run the drawing game service");
    ServiceConfig svc;
    serve_cmd->add_option("--data", data_root, "Dataset root (env CONTOURBENCH_DATA)")->capture_default_str();
    serve_cmd->add_option("--host", svc.host)->capture_default_str();
    serve_cmd->add_option("--port", svc.port)->capture_default_str();
    serve_cmd->add_option("--cutoff", svc.cutoff)->capture_default_str();
    serve_cmd->add_option("--seed", svc.seed)->capture_default_str();
    add_field_params(serve_cmd, svc.params);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*import_cmd) {
            const std::string id = svg_id.empty() ? fs::path(svg_in).stem().string() : svg_id;
            emit(serialize_drawing(import_svg(read_file(svg_in), id, flatten_tol)), svg_out, out);
        } else if (*raster_cmd) {
            save_binary_map_png(rasterize_drawing(load_drawing(raster_in), scale), raster_out);
        } else if (*stats_cmd) {
            if (stats_in.empty()) {
                stats_in.push_back((fs::path(data_root) / "drawings").string());
            }
            const auto st = drawing_stats(collect_drawings(stats_in));
            nlohmann::ordered_json j;
            j["n_drawings"] = st.n_drawings;
            j["mean_strokes"] = st.mean_strokes;
            j["mean_control_points"] = st.mean_control_points;
            out << j.dump(2) << '\n';
        } else if (*consensus_cmd) {
            const Dataset ds(data_root);
            const auto drawings = ds.drawings(cons_image);
            if (drawings.empty()) {
                throw Error("image " + cons_image + " has no drawings");
            }
            ConsensusOptions opts;
            opts.rho = cons_rho;
            opts.reference = cons_ref;
            opts.mode = cons_union ? ConsensusMode::union_all : ConsensusMode::reference;
            opts.until_stable = !cons_single_pass;
            const auto tol = Tolerance::from_diagonal(drawings.front().width, drawings.front().height, cons_tol);
            const auto result = consensus_drawings(drawings, tol, opts);
            emit(consensus_json(result).dump(2), cons_out, out);
            if (!cons_drawing_out.empty()) {
                save_drawing(result.consensus_drawing, cons_drawing_out);
            }
        } else if (*eval_cmd) {
            const auto summary = run_eval(eval_args);
            emit(eval_summary_json(summary), eval_args.out, out);
            if (!eval_args.csv.empty()) {
                std::ofstream csv(eval_args.csv, std::ios::binary | std::ios::trunc);
                csv << eval_summary_csv(summary);
            }
        } else if (*toy_cmd) {
            emit(run_toy(toy).dump(2), toy.out, out);
        } else if (*field_cmd) {
            game::RewardField field;
            if (!field_boundary.empty()) {
                const auto soft = load_soft_map_png(field_boundary);
                const std::string id = field_image.empty() ? fs::path(field_boundary).stem().string() : field_image;
                field = game::generate_field(soft, field_params, field_seed, id);
            } else if (!field_drawing.empty()) {
                const Drawing d = load_drawing(field_drawing);
                field = game::generate_field(rasterize_drawing(d), field_params, field_seed,
                                             field_image.empty() ? d.image_id : field_image);
            } else {
                throw Error("game-field needs --boundary or --drawing");
            }
            emit(game::field_to_json(field).dump(2), field_out, out);
        } else if (*classify_cmd) {
            const Drawing d = load_drawing(cls_drawing);
            nlohmann::json field_doc;
            try {
                field_doc = nlohmann::json::parse(read_file(cls_field));
            } catch (const nlohmann::json::parse_error& e) {
                throw ParseError(cls_field + ": " + e.what());
            }
            const auto c = game::classify_submission(d, game::field_from_json(field_doc), cls_cutoff);
            nlohmann::ordered_json j;
            j["status"] = c.accepted ? "accepted" : "rejected";
            j["accepted"] = c.accepted;
            j["fraction"] = c.fraction;
            out << j.dump(2) << '\n';
        } else if (*serve_cmd) {
            svc.dataset_root = data_root;
            if (!fs::is_directory(svc.dataset_root)) {
                throw Error("dataset root " + data_root + " does not exist");
            }
            GameService service(svc);
            HttpServer server(service, svc.host, svc.port);
            server.start();
            err << "serving " << service.image_ids().size() << " images on http://" << svc.host << ':'
                << server.port() << '\n';
            server.wait();
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace contour::gateway
