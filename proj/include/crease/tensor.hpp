#ifndef CREASE_TENSOR_HPP
#define CREASE_TENSOR_HPP

#include <array>
#include <vector>

#include "crease/field.hpp"
#include "crease/scale_select.hpp"

namespace crease {

struct DiffusivityConfig {
    enum class Mode { both, ridges_only, valleys_only };
    double lambda = 0.005; // contrast parameter, intensity-curvature units
    Mode mode = Mode::both;

    void validate() const;
};

/// Perona-Malik diffusivity g(s) = 1 / (1 + s/lambda^2) for s >= 0.
double perona_malik(double s, double lambda);

/// Diffusion-tensor eigenvalues from normalized-Hessian eigenvalues:
/// mu_i = g(nu_i^2) for i in {1,2} (forced to 1 for the suppressed polarity),
/// mu3 = (mu1+mu2)/2, mu4 = 0.
std::array<double, 4> mu_from_nu(double nu1, double nu2, const DiffusivityConfig& cfg);

/// 4x4 symmetric matrix form of the fourth-order diffusion tensor, acting on
/// vectorized (xx, xy, yx, yy) matrices. Rebuilt as E * diag(mu) * E^T where
/// the columns of E are the vectorized eigentensors
///   E1 = e1(x)e1, E2 = e2(x)e2,
///   E3 = (e1(x)e2 + e2(x)e1)/sqrt2, E4 = (e1(x)e2 - e2(x)e1)/sqrt2.
struct FourthOrderTensor {
    std::array<double, 16> m{}; // row-major 4x4

    std::array<double, 4> apply_raw(const std::array<double, 4>& h) const {
        std::array<double, 4> t{};
        for (int i = 0; i < 4; ++i) {
            const double* row = m.data() + 4 * i;
            t[i] = row[0] * h[0] + row[1] * h[1] + row[2] * h[2] + row[3] * h[3];
        }
        return t;
    }

    /// Double contraction with a symmetric matrix; result re-symmetrized.
    SymMat2 apply(const SymMat2& h) const {
        auto t = apply_raw({h.xx, h.xy, h.xy, h.yy});
        return {t[0], 0.5 * (t[1] + t[2]), t[3]};
    }
};

/// Requires an orthonormal frame (checked to 1e-8).
FourthOrderTensor build_tensor(Vec2 e1, Vec2 e2, const std::array<double, 4>& mu);

struct FourthOrderTensorField {
    int width = 0;
    int height = 0;
    std::vector<FourthOrderTensor> t;

    FourthOrderTensorField() = default;
    FourthOrderTensorField(int w, int h) : width(w), height(h), t(static_cast<std::size_t>(w) * h) {}
    FourthOrderTensor& at(int x, int y) { return t[static_cast<std::size_t>(y) * width + x]; }
    const FourthOrderTensor& at(int x, int y) const { return t[static_cast<std::size_t>(y) * width + x]; }
};

/// Per-pixel tensors from a normalized-Hessian field.
FourthOrderTensorField build_tensor_field(const NormalizedHessianField& nh,
                                          const DiffusivityConfig& cfg);

SymMat2 double_contract(const FourthOrderTensor& d, const SymMat2& h);

} // namespace crease

#endif
