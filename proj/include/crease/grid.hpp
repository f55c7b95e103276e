#ifndef CREASE_GRID_HPP
#define CREASE_GRID_HPP

#include <vector>

#include "crease/field.hpp"

namespace crease {

/// Sampled 1D Gaussian, radius ceil(4*sigma), renormalized to sum 1.
std::vector<double> gaussian_kernel(double sigma);

/// Separable discrete Gaussian with mirror (reflect) border extension.
/// sigma = 0 returns an identical copy. sigma is in pixel units.
ScalarField2D gaussian_smooth(const ScalarField2D& u, double sigma);

/// Central differences in the interior, one-sided at the borders,
/// scaled by the pixel edge lengths.
GradientField gradient(const ScalarField2D& u);

/// Second derivatives via the 3-point stencils
///   u_xx ~ (u[x-1,y] - 2u[x,y] + u[x+1,y]) / dx^2
///   u_yy ~ (u[x,y-1] - 2u[x,y] + u[x,y+1]) / dy^2
/// and the 4-corner stencil for u_xy divided by 4*dx*dy. Where a stencil
/// leaves the domain the derivative is 0 (natural boundary condition).
HessianField hessian(const ScalarField2D& u);

/// Adjoint accumulation of the second-derivative stencils: returns
/// L_xx^T t_xx + L_xy^T t_xy + L_yx^T t_yx + L_yy^T t_yy, with each stencil
/// contributing only from pixels where it fits.
ScalarField2D second_derivative_adjoint(const ScalarField2D& txx, const ScalarField2D& txy,
                                        const ScalarField2D& tyx, const ScalarField2D& tyy);

/// Stencil-fit masks shared by hessian() and the solver's adjoint pass.
inline bool fits_xx(int x, int, int width, int) { return x >= 1 && x <= width - 2; }
inline bool fits_yy(int, int y, int, int height) { return y >= 1 && y <= height - 2; }
inline bool fits_xy(int x, int y, int width, int height) {
    return x >= 1 && x <= width - 2 && y >= 1 && y <= height - 2;
}

} // namespace crease

#endif
