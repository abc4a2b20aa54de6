#pragma once

#include <cstddef>
#include <vector>

#include "contour/grid.hpp"

namespace contour {

/// Maximum offset at which a predicted pixel may match a ground-truth pixel.
struct Tolerance {
    double d_max = 1.0;

    /// Twice the usual 0.75%-of-diagonal boundary tolerance.
    static constexpr double kDefaultDiagonalFraction = 0.015;

    static Tolerance from_diagonal(int width, int height, double fraction = kDefaultDiagonalFraction);
};

struct MatchedPair {
    Pixel pred;
    Pixel gt;
    double distance = 0.0;
};

struct MatchResult {
    std::vector<MatchedPair> pairs;
    std::vector<Pixel> unmatched_pred;
    std::vector<Pixel> unmatched_gt;
    double total_cost = 0.0;
};

/// Maximum-cardinality matching between on-pixels of the two maps using
/// edges no longer than d_max; among those, the one with the least total
/// Euclidean length. Solved exactly by successive shortest paths on each
/// connected component of the candidate graph.
MatchResult match_pixels(const BinaryMap& pred, const BinaryMap& gt, Tolerance tol);

/// Same problem on explicit pixel lists (duplicates are not allowed).
MatchResult match_pixel_sets(const std::vector<Pixel>& pred, const std::vector<Pixel>& gt, Tolerance tol);

struct PrecisionRecall {
    double precision = 0.0;
    double recall = 0.0;
};

/// Precision := 1 when there are no predictions, recall := 1 when there is
/// no ground truth.
PrecisionRecall precision_recall(std::size_t n_matched, std::size_t n_pred, std::size_t n_gt);
PrecisionRecall pr_from_match(const MatchResult& r, std::size_t n_pred, std::size_t n_gt);

/// Harmonic mean with F := 0 when P + R = 0.
double f1_score(double precision, double recall);

}  // namespace contour
