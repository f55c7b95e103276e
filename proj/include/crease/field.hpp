#ifndef CREASE_FIELD_HPP
#define CREASE_FIELD_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "crease/errors.hpp"
#include "crease/vec2.hpp"

namespace crease {

/// Rectangular grid of real intensities, row-major, with pixel edge lengths
/// dx, dy. Pixel (x, y) sits at spatial position (x*dx, y*dy); tests and
/// curve coordinates use pixel units (dx = dy = 1) unless stated otherwise.
struct ScalarField2D {
    int width = 0;
    int height = 0;
    double dx = 1.0;
    double dy = 1.0;
    std::vector<double> data;

    ScalarField2D() = default;
    ScalarField2D(int w, int h, double fill = 0.0, double dx_ = 1.0, double dy_ = 1.0)
        : width(w), height(h), dx(dx_), dy(dy_) {
        if (w <= 0 || h <= 0) throw parameter_error("field dimensions must be positive");
        if (!(dx_ > 0.0) || !(dy_ > 0.0)) throw parameter_error("pixel edge lengths must be positive");
        data.assign(static_cast<std::size_t>(w) * h, fill);
    }

    std::size_t size() const { return data.size(); }
    std::size_t idx(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    double& at(int x, int y) { return data[idx(x, y)]; }
    double at(int x, int y) const { return data[idx(x, y)]; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }

    bool same_dims(const ScalarField2D& o) const { return width == o.width && height == o.height; }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }

    /// Bilinear interpolation, clamped to the domain.
    double sample(double x, double y) const;
};

/// Per-pixel gradient (u_x, u_y).
struct GradientField {
    ScalarField2D gx, gy;
    Vec2 at(int x, int y) const { return {gx.at(x, y), gy.at(x, y)}; }
};

/// Per-pixel symmetric Hessian (u_xx, u_xy, u_yy); u_yx = u_xy structurally.
struct HessianField {
    ScalarField2D xx, xy, yy;
    SymMat2 at(int x, int y) const { return {xx.at(x, y), xy.at(x, y), yy.at(x, y)}; }
};

/// l2 norm of the pixel vector. Row-wise partial sums, deterministic.
double l2_norm(const ScalarField2D& u);

double min_value(const ScalarField2D& u);
double max_value(const ScalarField2D& u);
double mean_value(const ScalarField2D& u);
double stddev_value(const ScalarField2D& u);

} // namespace crease

#endif
