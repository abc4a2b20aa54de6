#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "contour/grid.hpp"
#include "contour/pixel_match.hpp"
#include "contour/stroke_model.hpp"

namespace contour {

struct ThresholdCounts {
    double threshold = 0.0;
    std::size_t n_pred = 0;
    std::size_t n_gt = 0;
    std::size_t n_matched = 0;

    friend bool operator==(const ThresholdCounts&, const ThresholdCounts&) = default;
};

struct ImageEval {
    std::string image_id;
    std::vector<ThresholdCounts> counts;  // strictly increasing thresholds
};

struct OperatingPoint {
    double threshold = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct EvalSummary {
    OperatingPoint ods;
    OperatingPoint ois;  // threshold is unused: each image picks its own
    std::vector<ImageEval> per_image;
};

struct EvalOptions {
    bool apply_nms = true;
    bool apply_thinning = true;
};

/// 0.01, 0.02, ..., 0.99.
std::vector<double> default_thresholds();

/// Soft prediction: nms -> threshold -> thin at each threshold, matched
/// against the rasterized ground truth.
ImageEval evaluate_prediction(const SoftMap& pred, const Drawing& gt, Tolerance tol,
                              const std::vector<double>& thresholds, const EvalOptions& options = {});

/// Vector prediction: rasterized once and recorded at the single threshold 0.
ImageEval evaluate_prediction(const Drawing& pred, const Drawing& gt, Tolerance tol);

/// ODS from summed counts at the best common threshold; OIS from summed
/// counts at each image's own best threshold. Ties go to the lower threshold.
EvalSummary aggregate(const std::vector<ImageEval>& per_image);

std::string eval_summary_json(const EvalSummary& summary, int indent = 2);

/// One row per (image, threshold) plus dataset-level rows under image_id "*".
std::string eval_summary_csv(const EvalSummary& summary);

}  // namespace contour
