#pragma once

#include <cstddef>
#include <vector>

#include "contour/pixel_match.hpp"
#include "contour/stroke_model.hpp"

namespace contour {

enum class ConsensusMode {
    reference,  // kept strokes of one designated drawing
    union_all,  // kept strokes of every drawing
};

struct ConsensusOptions {
    double rho = 0.75;
    std::size_t reference = 0;
    ConsensusMode mode = ConsensusMode::reference;
    /// Strokes rasterizing to fewer pixels than this only need to match one peer.
    std::size_t short_stroke_pixels = 3;
    /// Repeat the test against the peers' surviving strokes until nothing
    /// more is removed. A single pass is not idempotent.
    bool until_stable = true;
};

struct ConsensusResult {
    /// kept[i] lists the retained stroke indices of drawing i, ascending.
    std::vector<std::vector<std::size_t>> kept;
    Drawing consensus_drawing;
    /// fractions[i][s][j]: match fraction of stroke s of drawing i against
    /// the whole of drawing j (first round). The diagonal entry j == i is 1.
    std::vector<std::vector<std::vector<double>>> per_stroke_fractions;
};

/// Share of the stroke's raster pixels matched one-to-one against the raster
/// of `other`. A stroke of zero pixels cannot occur (rasters are non-empty).
double stroke_match_fraction(const Stroke& s, const Drawing& other, Tolerance tol);

/// Keeps a stroke only if it matches every other drawing with fraction >= rho.
/// Peers are reduced to their kept strokes and the test repeated until stable.
ConsensusResult consensus_drawings(const std::vector<Drawing>& drawings, Tolerance tol,
                                   const ConsensusOptions& options = {});

/// The input drawings restricted to their kept strokes.
std::vector<Drawing> kept_drawings(const std::vector<Drawing>& drawings, const ConsensusResult& result);

}  // namespace contour
