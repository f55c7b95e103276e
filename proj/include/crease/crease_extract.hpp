#ifndef CREASE_CREASE_EXTRACT_HPP
#define CREASE_CREASE_EXTRACT_HPP

#include "crease/curves.hpp"
#include "crease/field.hpp"
#include "crease/grid.hpp"

namespace crease {

/// d = det(g | Hg) with g = grad(u_sigma), H = hessian(u_sigma). The zero
/// level set of d is a superset of the creases.
struct CreaseFieldResult {
    ScalarField2D d;
};

CreaseFieldResult crease_field(const ScalarField2D& u, double sigma);

struct ExtractOptions {
    double strength_threshold = 1e-4; // drop points with |nu_cross| below this
};

/// Marching squares on the zero set of d, then the superset filter: a point
/// is kept as ridge (valley) when the largest-magnitude eigenvalue of
/// H(u_sigma) there is negative (positive) and at least the strength
/// threshold in magnitude. Chains split at dropped points and kind changes.
CurveSet marching_squares(const CreaseFieldResult& d, const ScalarField2D& u, double sigma,
                          const ExtractOptions& opts = {});

/// Crease extraction with per-pixel sigma from a scale map.
CurveSet extract_creases(const ScalarField2D& u_filtered, const ScalarField2D& scale_map,
                         const ExtractOptions& opts = {});

/// Uniform-sigma convenience overload (sigma = 1 matches the default used
/// when no scale map is available).
CurveSet extract_creases(const ScalarField2D& u_filtered, double sigma = 1.0,
                         const ExtractOptions& opts = {});

} // namespace crease

#endif
