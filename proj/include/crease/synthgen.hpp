#ifndef CREASE_SYNTHGEN_HPP
#define CREASE_SYNTHGEN_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "crease/curves.hpp"
#include "crease/field.hpp"

namespace crease {

struct SyntheticImage {
    ScalarField2D image;
    CurveSet ground_truth;
};

/// Concentric rings with Gaussian cross-profiles exp(-(r-radius)^2/(2 w^2)),
/// summed and clamped to [0,1]; ground truth circles sampled at 0.5 px arc
/// length. Warns on stderr when profiles overlap by more than 10% of peak.
SyntheticImage gen_concentric(int size, const std::vector<double>& radii,
                              const std::vector<double>& widths);

/// Along-path occlusion interval in arc length, [begin, end) in pixels.
struct OcclusionInterval {
    double begin = 0.0;
    double end = 0.0;
};

/// Gaussian cross-profile vessel along a sampled path; intensity drops to
/// background inside occlusions with 1 px ramps; ground truth excludes the
/// occluded spans.
SyntheticImage gen_occluded_vessel(int size, const std::vector<Vec2>& path, double width,
                                   const std::vector<OcclusionInterval>& occlusions);

/// One-period sine path spanning the image horizontally, margin px in from
/// the sides.
std::vector<Vec2> make_sine_path(int size, double amplitude, double margin = 12.0);

/// Adds i.i.d. zero-mean Gaussian noise with sigma = stddev(u)/target_snr.
/// Deterministic per seed (counter-based generator); output not clamped.
ScalarField2D add_noise(const ScalarField2D& u, double target_snr, std::uint64_t seed);

/// Symmetric trapezoid in [0,1]: linear ramps at the given slope per sample,
/// `plateau` samples wide at the top, centered in `length` samples.
std::vector<double> gen_trapezoid_1d(int length, int plateau, double slope);

} // namespace crease

#endif
