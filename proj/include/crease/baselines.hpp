#ifndef CREASE_BASELINES_HPP
#define CREASE_BASELINES_HPP

#include <vector>

#include "crease/field.hpp"

namespace crease {

/// One explicit step of isotropic fourth-order diffusion: every Hessian entry
/// scaled by g(|H|_F^2), then the adjoint stencils. sigma_reg > 0 evaluates
/// the diffusivity argument on H(u_sigma) while the flux keeps H(u).
ScalarField2D ifod_step(const ScalarField2D& u, double lambda, double tau,
                        double sigma_reg = 0.0);

/// One explicit step of second-order Perona-Malik diffusion with half-point
/// diffusivity averaging and reflecting (no-flux) borders.
ScalarField2D pm_second_order_step(const ScalarField2D& u, double lambda, double tau);

/// 1D Perona-Malik diffusion of order 2 or 4 (order 4 uses g(u_xx^2) u_xx
/// with the adjoint second difference and natural boundaries).
std::vector<double> demo_1d(const std::vector<double>& signal, int order, double lambda,
                            double tau, int steps);

struct RidgeStrengthConfig {
    double gamma = 0.75;
    std::vector<double> t_grid; // stopping times; defaults to 1..30

    void validate() const;
    static RidgeStrengthConfig defaults();
};

/// Scale-selective Gaussian baseline: per pixel the t maximizing the ridge
/// strength t^{4 gamma} (u_xx+u_yy)^2 ((u_xx-u_yy)^2 + 4 u_xy^2) of
/// u smoothed at sigma = sqrt(2t); output takes the smoothed value at the
/// winning scale, then min-max normalized to [0,1]. Constant fields pass
/// through unchanged. post_sigma > 0 adds a final Gaussian smoothing.
/// t_map, when given, receives the per-pixel winning stopping time.
ScalarField2D multiscale_gaussian(const ScalarField2D& u, const RidgeStrengthConfig& cfg,
                                  double post_sigma = 0.0, ScalarField2D* t_map = nullptr);

/// Windowed bilateral filter, radius ceil(3 sigma_spatial), per-pixel weight
/// renormalization.
ScalarField2D bilateral(const ScalarField2D& u, double sigma_spatial, double sigma_range);

} // namespace crease

#endif
