#ifndef CREASE_SCALE_SELECT_HPP
#define CREASE_SCALE_SELECT_HPP

#include <cstdint>
#include <vector>

#include "crease/field.hpp"
#include "crease/grid.hpp"

namespace crease {

enum class Polarity { ridges, valleys };

struct ScaleConfig {
    std::vector<double> sigmas;   // strictly increasing, all > 0
    double rho = 0.5;             // regularization width of the normalized Hessian
    double beta = 0.5;            // blob suppression
    double theta = 0.2;           // vesselness segmentation threshold
    Polarity polarity = Polarity::ridges;

    void validate() const;
};

/// Per-pixel vesselness maximum, the scale attaining it, and the
/// theta-segmentation. scale_map values are drawn from sigmas; background
/// pixels carry sigmas.front().
struct VesselnessResult {
    ScalarField2D v_map;
    ScalarField2D scale_map;
    std::vector<std::uint8_t> segmentation; // 1 = vesselness >= theta
    std::vector<double> sigmas;             // copy of the analysed scale list

    bool segmented(int x, int y) const {
        return segmentation[static_cast<std::size_t>(y) * v_map.width + x] != 0;
    }
};

struct NormalizedHessianField {
    HessianField h;
};

struct Eigen2 {
    double nu1 = 0.0, nu2 = 0.0; // |nu1| <= |nu2|
    Vec2 e1, e2;                 // unit, mutually orthogonal
};

/// Closed-form symmetric 2x2 eigendecomposition, ordered by |nu|.
/// Ties order by signed value ascending; multiples of the identity get the
/// axis-aligned frame. Eigenvector signs are fixed deterministically.
Eigen2 hessian_eigen(const SymMat2& m);

/// Frangi tubularity from sorted scale-normalized eigenvalues (|nu1t|<=|nu2t|).
/// Returns 0 when nu2t >= 0 or c <= 0.
double frangi_vesselness(double nu1t, double nu2t, double beta, double c);

/// H_rho(u_sigma): per pixel, the Hessian of u smoothed at that pixel's sigma,
/// scaled by 1/sqrt(1+|grad u_sigma|), entry fields then smoothed with rho.
NormalizedHessianField normalized_hessian(const ScalarField2D& u,
                                          const ScalarField2D& sigma_map, double rho);

/// Frangi scale sweep: per scale, c = max(S)/2 over the image; per pixel the
/// maximal vesselness and its argmax sigma. Valley polarity negates the image
/// before analysis.
VesselnessResult select_scales(const ScalarField2D& u, const ScaleConfig& cfg);

/// Removes boundary over/under-estimation: each segmented pixel takes the
/// sigma closest to the mean scale along its cross-section (marched in the
/// +-e2 direction of H(u_sigma) until leaving the segmentation, capped at
/// 2*sigma_max steps each way).
ScalarField2D postprocess_scale_map(const VesselnessResult& result, const ScalarField2D& u);

// ------------------------------------------------------------------
// Shared per-cycle analysis used by the solver: keeps the per-scale
// derivative fields so scale selection, postprocessing and the normalized
// Hessian reuse one set of convolutions.

struct ScaleAnalysis {
    std::vector<double> sigmas;
    std::vector<GradientField> grads;     // per scale
    std::vector<HessianField> hessians;   // per scale
    std::vector<int> scale_idx;           // per pixel argmax index into sigmas
    VesselnessResult result;
};

ScaleAnalysis analyze_scales(const ScalarField2D& u, const ScaleConfig& cfg);
std::vector<int> postprocess_scale_idx(const ScaleAnalysis& a, const ScalarField2D& u);
NormalizedHessianField normalized_hessian_at(const ScaleAnalysis& a,
                                             const std::vector<int>& scale_idx, double rho);

} // namespace crease

#endif
