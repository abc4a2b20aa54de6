#include "contour/consensus.hpp"

#include <stdexcept>

namespace contour {

namespace {

std::vector<Pixel> stroke_pixels(const Stroke& s, int width, int height) {
    Drawing single;
    single.width = width;
    single.height = height;
    single.strokes = {s};
    return rasterize_drawing(single).pixels();
}

double fraction_against(const std::vector<Pixel>& stroke_px, const std::vector<Pixel>& other_px, Tolerance tol) {
    if (stroke_px.empty()) {
        return 0.0;
    }
    const auto r = match_pixel_sets(stroke_px, other_px, tol);
    return static_cast<double>(r.pairs.size()) / static_cast<double>(stroke_px.size());
}

}  // namespace

double stroke_match_fraction(const Stroke& s, const Drawing& other, Tolerance tol) {
    return fraction_against(stroke_pixels(s, other.width, other.height), rasterize_drawing(other).pixels(), tol);
}

ConsensusResult consensus_drawings(const std::vector<Drawing>& drawings, Tolerance tol,
                                   const ConsensusOptions& options) {
    if (drawings.size() < 2) {
        throw std::invalid_argument("consensus needs at least two drawings");
    }
    if (!(options.rho > 0.0 && options.rho <= 1.0)) {
        throw std::invalid_argument("consensus rho must lie in (0,1]");
    }
    if (options.mode == ConsensusMode::reference && options.reference >= drawings.size()) {
        throw std::invalid_argument("consensus reference index out of range");
    }
    const Drawing& first = drawings.front();
    for (const Drawing& d : drawings) {
        if (d.image_id != first.image_id) {
            throw std::invalid_argument("consensus drawings belong to different images: " + first.image_id + ", " +
                                        d.image_id);
        }
        if (d.width != first.width || d.height != first.height) {
            throw DimensionMismatch("consensus drawings of " + first.image_id + " differ in size");
        }
    }

    const std::size_t n = drawings.size();
    ConsensusResult result;
    result.kept.resize(n);
    result.per_stroke_fractions.resize(n);
    std::vector<std::vector<std::vector<Pixel>>> stroke_px(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t s = 0; s < drawings[i].strokes.size(); ++s) {
            stroke_px[i].push_back(stroke_pixels(drawings[i].strokes[s], first.width, first.height));
            result.kept[i].push_back(s);
        }
    }

    // Each round tests the surviving strokes against the surviving peers.
    for (bool first_round = true;; first_round = false) {
        std::vector<std::vector<Pixel>> rasters;
        rasters.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            Drawing d = drawings[i];
            d.strokes.clear();
            for (std::size_t s : result.kept[i]) {
                d.strokes.push_back(drawings[i].strokes[s]);
            }
            rasters.push_back(rasterize_drawing(d).pixels());
        }

        bool removed = false;
        std::vector<std::vector<std::size_t>> next(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t s : result.kept[i]) {
                const auto& px = stroke_px[i][s];
                std::vector<double> row(n, 1.0);
                std::size_t peers_matched = 0;
                for (std::size_t j = 0; j < n; ++j) {
                    if (j == i) {
                        continue;
                    }
                    row[j] = fraction_against(px, rasters[j], tol);
                    if (row[j] >= options.rho) {
                        ++peers_matched;
                    }
                }
                const bool is_short = px.size() < options.short_stroke_pixels;
                if (is_short ? peers_matched >= 1 : peers_matched == n - 1) {
                    next[i].push_back(s);
                } else {
                    removed = true;
                }
                if (first_round) {
                    result.per_stroke_fractions[i].push_back(std::move(row));
                }
            }
        }
        result.kept = std::move(next);
        if (!removed || !options.until_stable) {
            break;
        }
    }

    Drawing& out = result.consensus_drawing;
    out.image_id = first.image_id;
    out.width = first.width;
    out.height = first.height;
    auto append_kept = [&](std::size_t i) {
        for (std::size_t s : result.kept[i]) {
            Stroke stroke = drawings[i].strokes[s];
            if (options.mode == ConsensusMode::union_all) {
                stroke.order_index = static_cast<int>(out.strokes.size());
            }
            out.strokes.push_back(std::move(stroke));
        }
    };
    if (options.mode == ConsensusMode::reference) {
        out.annotator_id = drawings[options.reference].annotator_id;
        append_kept(options.reference);
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            append_kept(i);
        }
    }
    return result;
}

std::vector<Drawing> kept_drawings(const std::vector<Drawing>& drawings, const ConsensusResult& result) {
    if (result.kept.size() != drawings.size()) {
        throw std::invalid_argument("consensus result does not belong to these drawings");
    }
    std::vector<Drawing> out;
    out.reserve(drawings.size());
    for (std::size_t i = 0; i < drawings.size(); ++i) {
        Drawing d = drawings[i];
        d.strokes.clear();
        for (std::size_t s : result.kept[i]) {
            d.strokes.push_back(drawings[i].strokes.at(s));
        }
        out.push_back(std::move(d));
    }
    return out;
}

}  // namespace contour
