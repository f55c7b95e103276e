#include "crease/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "crease/grid.hpp"
#include "crease/parallel.hpp"
#include "crease/tensor.hpp"

namespace crease {

ScalarField2D ifod_step(const ScalarField2D& u, double lambda, double tau, double sigma_reg) {
    if (!(lambda > 0.0)) throw parameter_error("lambda must be positive");
    if (!(tau > 0.0)) throw parameter_error("step size must be positive");
    HessianField hf = hessian(u);
    // The diffusivity argument may be regularized; the flux keeps H(u).
    const HessianField& harg = sigma_reg > 0.0 ? hessian(gaussian_smooth(u, sigma_reg)) : hf;

    const int w = u.width, h = u.height;
    ScalarField2D txx(w, h, 0.0, u.dx, u.dy), txy = txx, tyy = txx;
    parallel_rows(h, [&](int y) {
        for (int x = 0; x < w; ++x) {
            SymMat2 ha = harg.at(x, y);
            const double frob2 = ha.xx * ha.xx + 2.0 * ha.xy * ha.xy + ha.yy * ha.yy;
            const double g = perona_malik(frob2, lambda);
            txx.at(x, y) = g * hf.xx.at(x, y);
            txy.at(x, y) = g * hf.xy.at(x, y);
            tyy.at(x, y) = g * hf.yy.at(x, y);
        }
    });
    ScalarField2D flux = second_derivative_adjoint(txx, txy, txy, tyy);
    ScalarField2D out = u;
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] -= tau * flux.data[i];
    return out;
}

ScalarField2D pm_second_order_step(const ScalarField2D& u, double lambda, double tau) {
    if (!(lambda > 0.0)) throw parameter_error("lambda must be positive");
    const double bound = 1.0 / (2.0 * (1.0 / (u.dx * u.dx) + 1.0 / (u.dy * u.dy)));
    if (!(tau > 0.0) || tau > bound + 1e-12)
        throw parameter_error("second-order step size exceeds the explicit bound");

    const int w = u.width, h = u.height;
    GradientField gr = gradient(u);
    ScalarField2D g(w, h, 0.0, u.dx, u.dy);
    parallel_rows(h, [&](int y) {
        for (int x = 0; x < w; ++x) {
            Vec2 v = gr.at(x, y);
            g.at(x, y) = perona_malik(dot(v, v), lambda);
        }
    });

    const double ixx = 1.0 / (u.dx * u.dx), iyy = 1.0 / (u.dy * u.dy);
    ScalarField2D out = u;
    // Flux form with half-point diffusivity averages; border fluxes are zero
    // (no-flux), which conserves the mean exactly.
    parallel_rows(h, [&](int y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            if (x + 1 < w)
                acc += 0.5 * (g.at(x, y) + g.at(x + 1, y)) * (u.at(x + 1, y) - u.at(x, y)) * ixx;
            if (x > 0)
                acc -= 0.5 * (g.at(x - 1, y) + g.at(x, y)) * (u.at(x, y) - u.at(x - 1, y)) * ixx;
            if (y + 1 < h)
                acc += 0.5 * (g.at(x, y) + g.at(x, y + 1)) * (u.at(x, y + 1) - u.at(x, y)) * iyy;
            if (y > 0)
                acc -= 0.5 * (g.at(x, y - 1) + g.at(x, y)) * (u.at(x, y) - u.at(x, y - 1)) * iyy;
            out.at(x, y) = u.at(x, y) + tau * acc;
        }
    });
    return out;
}

std::vector<double> demo_1d(const std::vector<double>& signal, int order, double lambda,
                            double tau, int steps) {
    const int n = static_cast<int>(signal.size());
    if (n < 5) throw parameter_error("signal must have at least 5 samples");
    if (order != 2 && order != 4) throw parameter_error("order must be 2 or 4");
    if (!(lambda > 0.0) || !(tau > 0.0) || steps < 0)
        throw parameter_error("invalid 1D diffusion parameters");

    std::vector<double> u = signal;
    std::vector<double> work(n), aux(n);
    for (int s = 0; s < steps; ++s) {
        if (order == 2) {
            // g on central-difference gradients, one-sided at the ends.
            for (int i = 0; i < n; ++i) {
                double ux = i == 0 ? u[1] - u[0]
                          : i == n - 1 ? u[n - 1] - u[n - 2]
                                       : 0.5 * (u[i + 1] - u[i - 1]);
                work[i] = perona_malik(ux * ux, lambda);
            }
            for (int i = 0; i < n; ++i) {
                double acc = 0.0;
                if (i + 1 < n) acc += 0.5 * (work[i] + work[i + 1]) * (u[i + 1] - u[i]);
                if (i > 0) acc -= 0.5 * (work[i - 1] + work[i]) * (u[i] - u[i - 1]);
                aux[i] = u[i] + tau * acc;
            }
        } else {
            // m = g(u_xx^2) u_xx on interior stencils, then the adjoint
            // second difference.
            for (int i = 0; i < n; ++i) {
                double uxx = (i >= 1 && i <= n - 2) ? u[i - 1] - 2.0 * u[i] + u[i + 1] : 0.0;
                work[i] = (i >= 1 && i <= n - 2) ? perona_malik(uxx * uxx, lambda) * uxx : 0.0;
            }
            for (int i = 0; i < n; ++i) {
                double acc = 0.0;
                if (i >= 1 && i <= n - 2) acc += -2.0 * work[i];
                if (i >= 2) acc += work[i - 1];
                if (i + 2 <= n - 1) acc += work[i + 1];
                aux[i] = u[i] - tau * acc;
            }
        }
        std::swap(u, aux);
    }
    return u;
}

void RidgeStrengthConfig::validate() const {
    if (!(gamma > 0.0)) throw parameter_error("gamma must be positive");
    if (t_grid.empty()) throw parameter_error("stopping-time grid must not be empty");
    double prev = 0.0;
    for (double t : t_grid) {
        if (!(t > prev)) throw parameter_error("stopping times must be positive and increasing");
        prev = t;
    }
}

RidgeStrengthConfig RidgeStrengthConfig::defaults() {
    RidgeStrengthConfig cfg;
    for (int t = 1; t <= 30; ++t) cfg.t_grid.push_back(t);
    return cfg;
}

ScalarField2D multiscale_gaussian(const ScalarField2D& u, const RidgeStrengthConfig& cfg,
                                  double post_sigma, ScalarField2D* t_map) {
    cfg.validate();
    const int w = u.width, h = u.height;
    const int nt = static_cast<int>(cfg.t_grid.size());

    std::vector<ScalarField2D> smoothed;
    smoothed.reserve(nt);
    std::vector<double> best_r(u.size(), -1.0);
    std::vector<int> best_idx(u.size(), 0);

    for (int ti = 0; ti < nt; ++ti) {
        const double t = cfg.t_grid[ti];
        smoothed.push_back(gaussian_smooth(u, std::sqrt(2.0 * t)));
        HessianField hf = hessian(smoothed.back());
        const double tn = std::pow(t, 4.0 * cfg.gamma);
        parallel_rows(h, [&](int y) {
            for (int x = 0; x < w; ++x) {
                SymMat2 m = hf.at(x, y);
                const double lap = m.xx + m.yy;
                const double aniso = (m.xx - m.yy) * (m.xx - m.yy) + 4.0 * m.xy * m.xy;
                const double r = tn * lap * lap * aniso;
                std::size_t i = u.idx(x, y);
                if (r > best_r[i]) { // strict: ties stay at the smaller t
                    best_r[i] = r;
                    best_idx[i] = ti;
                }
            }
        });
    }

    ScalarField2D out(w, h, 0.0, u.dx, u.dy);
    for (std::size_t i = 0; i < u.size(); ++i) out.data[i] = smoothed[best_idx[i]].data[i];
    if (t_map) {
        *t_map = ScalarField2D(w, h, 0.0, u.dx, u.dy);
        for (std::size_t i = 0; i < u.size(); ++i) t_map->data[i] = cfg.t_grid[best_idx[i]];
    }

    const double lo = min_value(out), hi = max_value(out);
    if (hi > lo)
        for (double& v : out.data) v = (v - lo) / (hi - lo);
    if (post_sigma > 0.0) out = gaussian_smooth(out, post_sigma);
    return out;
}

ScalarField2D bilateral(const ScalarField2D& u, double sigma_spatial, double sigma_range) {
    if (!(sigma_spatial > 0.0) || !(sigma_range > 0.0))
        throw parameter_error("bilateral sigmas must be positive");
    const int r = static_cast<int>(std::ceil(3.0 * sigma_spatial));
    const double is2 = -0.5 / (sigma_spatial * sigma_spatial);
    const double ir2 = -0.5 / (sigma_range * sigma_range);

    std::vector<double> spatial((2 * r + 1) * (2 * r + 1));
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx)
            spatial[(dy + r) * (2 * r + 1) + (dx + r)] = std::exp((dx * dx + dy * dy) * is2);

    ScalarField2D out = u;
    parallel_rows(u.height, [&](int y) {
        for (int x = 0; x < u.width; ++x) {
            const double center = u.at(x, y);
            double wsum = 0.0, acc = 0.0;
            const int y0 = std::max(0, y - r), y1 = std::min(u.height - 1, y + r);
            const int x0 = std::max(0, x - r), x1 = std::min(u.width - 1, x + r);
            for (int qy = y0; qy <= y1; ++qy)
                for (int qx = x0; qx <= x1; ++qx) {
                    const double v = u.at(qx, qy);
                    const double d = v - center;
                    const double wgt = spatial[(qy - y + r) * (2 * r + 1) + (qx - x + r)]
                                     * std::exp(d * d * ir2);
                    wsum += wgt;
                    acc += wgt * v;
                }
            out.at(x, y) = acc / wsum;
        }
    });
    return out;
}

} // namespace crease
