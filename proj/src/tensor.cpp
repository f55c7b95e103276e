#include "crease/tensor.hpp"

#include <cmath>

#include "crease/parallel.hpp"

namespace crease {

void DiffusivityConfig::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw parameter_error("contrast parameter lambda must be positive");
}

double perona_malik(double s, double lambda) {
    return 1.0 / (1.0 + s / (lambda * lambda));
}

std::array<double, 4> mu_from_nu(double nu1, double nu2, const DiffusivityConfig& cfg) {
    cfg.validate();
    auto mu = [&](double nu) {
        if (cfg.mode == DiffusivityConfig::Mode::ridges_only && nu >= 0.0) return 1.0;
        if (cfg.mode == DiffusivityConfig::Mode::valleys_only && nu <= 0.0) return 1.0;
        return perona_malik(nu * nu, cfg.lambda);
    };
    const double m1 = mu(nu1);
    const double m2 = mu(nu2);
    return {m1, m2, 0.5 * (m1 + m2), 0.0};
}

FourthOrderTensor build_tensor(Vec2 e1, Vec2 e2, const std::array<double, 4>& mu) {
    const double n1 = dot(e1, e1), n2 = dot(e2, e2), d12 = dot(e1, e2);
    if (std::abs(n1 - 1.0) > 1e-8 || std::abs(n2 - 1.0) > 1e-8 || std::abs(d12) > 1e-8)
        throw parameter_error("build_tensor: frame must be orthonormal");

    const double a = e1.x, b = e1.y, c = e2.x, d = e2.y;
    const double r = 1.0 / std::sqrt(2.0);
    // Columns of E: vectorized eigentensors in (xx, xy, yx, yy) order.
    const double E[4][4] = {
        {a * a, c * c, r * 2.0 * a * c, 0.0},
        {a * b, c * d, r * (a * d + b * c), r * (a * d - b * c)},
        {a * b, c * d, r * (a * d + b * c), -r * (a * d - b * c)},
        {b * b, d * d, r * 2.0 * b * d, 0.0},
    };

    FourthOrderTensor t;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double acc = 0.0;
            for (int k = 0; k < 4; ++k) acc += mu[k] * E[i][k] * E[j][k];
            t.m[4 * i + j] = acc;
        }
    return t;
}

SymMat2 double_contract(const FourthOrderTensor& d, const SymMat2& h) {
    return d.apply(h);
}

FourthOrderTensorField build_tensor_field(const NormalizedHessianField& nh,
                                          const DiffusivityConfig& cfg) {
    cfg.validate();
    const int w = nh.h.xx.width, h = nh.h.xx.height;
    FourthOrderTensorField field(w, h);
    parallel_rows(h, [&](int y) {
        for (int x = 0; x < w; ++x) {
            Eigen2 e = hessian_eigen(nh.h.at(x, y));
            field.at(x, y) = build_tensor(e.e1, e.e2, mu_from_nu(e.nu1, e.nu2, cfg));
        }
    });
    return field;
}

} // namespace crease
