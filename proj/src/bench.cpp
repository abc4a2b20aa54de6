#include "contour/bench.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "contour/raster_ops.hpp"

namespace contour {

namespace {

void check_thresholds(const std::vector<double>& thresholds) {
    if (thresholds.empty()) {
        throw std::invalid_argument("threshold list is empty");
    }
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (!(thresholds[i] >= 0.0 && thresholds[i] < 1.0)) {
            throw std::invalid_argument("thresholds must lie in [0,1)");
        }
        if (i > 0 && !(thresholds[i] > thresholds[i - 1])) {
            throw std::invalid_argument("thresholds must be strictly increasing");
        }
    }
}

struct Totals {
    std::size_t n_pred = 0;
    std::size_t n_gt = 0;
    std::size_t n_matched = 0;

    void add(const ThresholdCounts& c) {
        n_pred += c.n_pred;
        n_gt += c.n_gt;
        n_matched += c.n_matched;
    }

    OperatingPoint point(double threshold) const {
        const auto pr = precision_recall(n_matched, n_pred, n_gt);
        return {threshold, pr.precision, pr.recall, f1_score(pr.precision, pr.recall)};
    }
};

}  // namespace

std::vector<double> default_thresholds() {
    std::vector<double> out;
    for (int k = 1; k <= 99; ++k) {
        out.push_back(k / 100.0);
    }
    return out;
}

ImageEval evaluate_prediction(const SoftMap& pred, const Drawing& gt, Tolerance tol,
                              const std::vector<double>& thresholds, const EvalOptions& options) {
    check_thresholds(thresholds);
    const BinaryMap gt_map = rasterize_drawing(gt);
    require_same_shape(pred, gt_map, "evaluate_prediction");
    const auto gt_pixels = gt_map.pixels();

    const SoftMap suppressed = options.apply_nms ? nms(pred) : pred;
    ImageEval eval;
    eval.image_id = gt.image_id;
    for (double t : thresholds) {
        BinaryMap bin = threshold(suppressed, t);
        if (options.apply_thinning) {
            bin = thin(bin);
        }
        const auto pred_pixels = bin.pixels();
        const auto match = match_pixel_sets(pred_pixels, gt_pixels, tol);
        eval.counts.push_back({t, pred_pixels.size(), gt_pixels.size(), match.pairs.size()});
    }
    return eval;
}

ImageEval evaluate_prediction(const Drawing& pred, const Drawing& gt, Tolerance tol) {
    const BinaryMap pred_map = rasterize_drawing(pred);
    const BinaryMap gt_map = rasterize_drawing(gt);
    require_same_shape(pred_map, gt_map, "evaluate_prediction");
    const auto pred_pixels = pred_map.pixels();
    const auto gt_pixels = gt_map.pixels();
    const auto match = match_pixel_sets(pred_pixels, gt_pixels, tol);
    ImageEval eval;
    eval.image_id = gt.image_id;
    eval.counts.push_back({0.0, pred_pixels.size(), gt_pixels.size(), match.pairs.size()});
    return eval;
}

EvalSummary aggregate(const std::vector<ImageEval>& per_image) {
    if (per_image.empty()) {
        throw std::invalid_argument("nothing to aggregate");
    }
    const auto& grid = per_image.front().counts;
    if (grid.empty()) {
        throw std::invalid_argument("image evaluation has no thresholds");
    }
    for (const ImageEval& e : per_image) {
        if (e.counts.size() != grid.size()) {
            throw std::invalid_argument("inconsistent threshold grids across images");
        }
        for (std::size_t k = 0; k < grid.size(); ++k) {
            if (e.counts[k].threshold != grid[k].threshold) {
                throw std::invalid_argument("inconsistent threshold grids across images");
            }
        }
    }

    EvalSummary summary;
    summary.per_image = per_image;

    bool have_ods = false;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        Totals totals;
        for (const ImageEval& e : per_image) {
            totals.add(e.counts[k]);
        }
        const auto point = totals.point(grid[k].threshold);
        if (!have_ods || point.f1 > summary.ods.f1) {
            summary.ods = point;
            have_ods = true;
        }
    }

    Totals best;
    for (const ImageEval& e : per_image) {
        std::size_t arg = 0;
        double best_f1 = -1.0;
        for (std::size_t k = 0; k < e.counts.size(); ++k) {
            const auto& c = e.counts[k];
            const auto pr = precision_recall(c.n_matched, c.n_pred, c.n_gt);
            const double f = f1_score(pr.precision, pr.recall);
            if (f > best_f1) {
                best_f1 = f;
                arg = k;
            }
        }
        best.add(e.counts[arg]);
    }
    summary.ois = best.point(0.0);
    return summary;
}

std::string eval_summary_json(const EvalSummary& summary, int indent) {
    using ordered_json = nlohmann::ordered_json;
    auto point = [](const OperatingPoint& p, bool with_threshold) {
        ordered_json j;
        if (with_threshold) {
            j["threshold"] = p.threshold;
        }
        j["precision"] = p.precision;
        j["recall"] = p.recall;
        j["f1"] = p.f1;
        return j;
    };
    ordered_json doc;
    doc["ods"] = point(summary.ods, true);
    doc["ois"] = point(summary.ois, false);
    ordered_json images = ordered_json::array();
    for (const ImageEval& e : summary.per_image) {
        ordered_json rows = ordered_json::array();
        for (const auto& c : e.counts) {
            rows.push_back({{"threshold", c.threshold},
                            {"n_pred", c.n_pred},
                            {"n_gt", c.n_gt},
                            {"n_matched", c.n_matched}});
        }
        images.push_back({{"image_id", e.image_id}, {"counts", std::move(rows)}});
    }
    doc["per_image"] = std::move(images);
    return doc.dump(indent);
}

std::string eval_summary_csv(const EvalSummary& summary) {
    std::ostringstream out;
    out << std::setprecision(6);
    out << "image_id,threshold,n_pred,n_gt,n_matched,precision,recall,f1\n";
    auto row = [&](const std::string& id, const ThresholdCounts& c) {
        const auto pr = precision_recall(c.n_matched, c.n_pred, c.n_gt);
        out << id << ',' << c.threshold << ',' << c.n_pred << ',' << c.n_gt << ',' << c.n_matched << ','
            << pr.precision << ',' << pr.recall << ',' << f1_score(pr.precision, pr.recall) << '\n';
    };
    for (const ImageEval& e : summary.per_image) {
        for (const auto& c : e.counts) {
            row(e.image_id, c);
        }
    }
    if (!summary.per_image.empty()) {
        const auto& grid = summary.per_image.front().counts;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            ThresholdCounts total{grid[k].threshold, 0, 0, 0};
            for (const ImageEval& e : summary.per_image) {
                total.n_pred += e.counts[k].n_pred;
                total.n_gt += e.counts[k].n_gt;
                total.n_matched += e.counts[k].n_matched;
            }
            row("*", total);
        }
    }
    return out.str();
}

}  // namespace contour
