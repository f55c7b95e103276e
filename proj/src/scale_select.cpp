#include "crease/scale_select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crease/parallel.hpp"

namespace crease {

void ScaleConfig::validate() const {
    if (sigmas.empty()) throw parameter_error("scale list must not be empty");
    double prev = 0.0;
    for (double s : sigmas) {
        if (!(s > prev)) throw parameter_error("scales must be positive and strictly increasing");
        prev = s;
    }
    if (!(theta >= 0.0 && theta <= 1.0)) throw parameter_error("theta must lie in [0,1]");
    if (!(beta > 0.0)) throw parameter_error("beta must be positive");
    if (!(rho >= 0.0)) throw parameter_error("rho must be non-negative");
}

Eigen2 hessian_eigen(const SymMat2& m) {
    if (!std::isfinite(m.xx) || !std::isfinite(m.xy) || !std::isfinite(m.yy))
        throw parameter_error("hessian_eigen: non-finite matrix entries");

    auto canonical = [](Vec2 v) {
        if (v.x < 0.0 || (v.x == 0.0 && v.y < 0.0)) return Vec2{-v.x, -v.y};
        return v;
    };

    double la, lb;  // la >= lb
    Vec2 va, vb;
    if (m.xy == 0.0) {
        // Axis-aligned; covers the multiple-of-identity tie-break.
        if (m.xx >= m.yy) {
            la = m.xx; va = {1.0, 0.0};
            lb = m.yy; vb = {0.0, 1.0};
        } else {
            la = m.yy; va = {0.0, 1.0};
            lb = m.xx; vb = {1.0, 0.0};
        }
        if (m.xx == m.yy) { va = {1.0, 0.0}; vb = {0.0, 1.0}; }
    } else {
        const double mean = 0.5 * (m.xx + m.yy);
        const double disc = std::hypot(0.5 * (m.xx - m.yy), m.xy);
        la = mean + disc;
        lb = mean - disc;
        // Eigenvector of la from the better-conditioned residual column.
        Vec2 c1{m.xy, la - m.xx};
        Vec2 c2{la - m.yy, m.xy};
        va = dot(c1, c1) >= dot(c2, c2) ? c1 : c2;
        double n = norm(va);
        va = {va.x / n, va.y / n};
        vb = {-va.y, va.x};
    }
    va = canonical(va);
    vb = canonical(vb);

    Eigen2 e;
    const bool a_first = std::abs(la) < std::abs(lb)
                      || (std::abs(la) == std::abs(lb) && la <= lb);
    if (a_first) {
        e.nu1 = la; e.e1 = va;
        e.nu2 = lb; e.e2 = vb;
    } else {
        e.nu1 = lb; e.e1 = vb;
        e.nu2 = la; e.e2 = va;
    }
    if (m.xy == 0.0 && m.xx == m.yy) { e.e1 = {1.0, 0.0}; e.e2 = {0.0, 1.0}; }
    return e;
}

double frangi_vesselness(double nu1t, double nu2t, double beta, double c) {
    if (nu2t >= 0.0 || !(c > 0.0)) return 0.0;
    const double rb = nu1t / nu2t;
    const double s2 = nu1t * nu1t + nu2t * nu2t;
    return std::exp(-rb * rb / (2.0 * beta * beta))
         * (1.0 - std::exp(-s2 / (2.0 * c * c)));
}

ScaleAnalysis analyze_scales(const ScalarField2D& u, const ScaleConfig& cfg) {
    cfg.validate();
    const int w = u.width, h = u.height;
    const int ns = static_cast<int>(cfg.sigmas.size());
    const double sign = cfg.polarity == Polarity::valleys ? -1.0 : 1.0;

    ScaleAnalysis a;
    a.sigmas = cfg.sigmas;
    a.grads.reserve(ns);
    a.hessians.reserve(ns);
    a.scale_idx.assign(u.size(), 0);
    a.result.v_map = ScalarField2D(w, h, 0.0, u.dx, u.dy);
    a.result.scale_map = ScalarField2D(w, h, cfg.sigmas.front(), u.dx, u.dy);
    a.result.segmentation.assign(u.size(), 0);
    a.result.sigmas = cfg.sigmas;

    std::vector<double> vmax(u.size(), -1.0);
    ScalarField2D s_map(w, h);

    for (int si = 0; si < ns; ++si) {
        const double sigma = cfg.sigmas[si];
        ScalarField2D us = gaussian_smooth(u, sigma);
        a.grads.push_back(gradient(us));
        a.hessians.push_back(hessian(us));
        const HessianField& hf = a.hessians.back();

        // Per-scale background parameter c = max(S)/2 over the image.
        const double s2norm = sigma * sigma;
        parallel_rows(h, [&](int y) {
            for (int x = 0; x < w; ++x) {
                Eigen2 e = hessian_eigen(hf.at(x, y));
                s_map.at(x, y) = s2norm * std::hypot(e.nu1, e.nu2);
            }
        });
        const double c = 0.5 * max_value(s_map);

        parallel_rows(h, [&](int y) {
            for (int x = 0; x < w; ++x) {
                Eigen2 e = hessian_eigen(hf.at(x, y));
                const double n1t = sign * s2norm * e.nu1;
                const double n2t = sign * s2norm * e.nu2;
                const double v = frangi_vesselness(n1t, n2t, cfg.beta, c);
                std::size_t i = u.idx(x, y);
                if (v > vmax[i]) {
                    vmax[i] = v;
                    a.scale_idx[i] = si;
                }
            }
        });
    }

    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            std::size_t i = u.idx(x, y);
            double v = std::max(vmax[i], 0.0);
            a.result.v_map.at(x, y) = v;
            a.result.scale_map.at(x, y) = cfg.sigmas[a.scale_idx[i]];
            a.result.segmentation[i] = v >= cfg.theta ? 1 : 0;
        }
    return a;
}

VesselnessResult select_scales(const ScalarField2D& u, const ScaleConfig& cfg) {
    return analyze_scales(u, cfg).result;
}

namespace {

int nearest_sigma_index(const std::vector<double>& sigmas, double value) {
    int best = 0;
    double best_d = std::abs(sigmas[0] - value);
    for (int i = 1; i < static_cast<int>(sigmas.size()); ++i) {
        double d = std::abs(sigmas[i] - value);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

// March direction: the 8-connected lattice direction nearest to e2, so every
// pixel of one cross-section walks the same lattice line and collects the
// same neighbor set. Marching along the exact eigenvector shears the
// rounded rays of adjacent pixels apart and makes the snapped averages
// flicker across a section.
std::pair<int, int> quantize_direction(Vec2 dir) {
    static const int steps[8][2] = {{1, 0},  {1, 1},   {0, 1},  {-1, 1},
                                    {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
    int best = 0;
    double best_dot = -2.0;
    for (int i = 0; i < 8; ++i) {
        const double inv = steps[i][0] != 0 && steps[i][1] != 0 ? 0.7071067811865476 : 1.0;
        const double d = (dir.x * steps[i][0] + dir.y * steps[i][1]) * inv;
        if (d > best_dot) {
            best_dot = d;
            best = i;
        }
    }
    return {steps[best][0], steps[best][1]};
}

// Cross-section march with nearest-pixel sampling; returns the mean of
// scale_map over the visited pixels.
double cross_section_mean(const VesselnessResult& res, const std::vector<int>& idx,
                          const std::vector<HessianField>& hessians, int x, int y) {
    const ScalarField2D& sm = res.scale_map;
    const int w = sm.width, h = sm.height;
    const double sigma_max = res.sigmas.back();
    const int cap = static_cast<int>(std::ceil(2.0 * sigma_max));

    Eigen2 e = hessian_eigen(hessians[idx[sm.idx(x, y)]].at(x, y));
    const auto [dx, dy] = quantize_direction(e.e2);

    double sum = sm.at(x, y);
    int count = 1;
    for (int s = -1; s <= 1; s += 2) {
        for (int k = 1; k <= cap; ++k) {
            const int nx = x + s * k * dx;
            const int ny = y + s * k * dy;
            if (nx < 0 || nx >= w || ny < 0 || ny >= h) break;
            if (!res.segmentation[sm.idx(nx, ny)]) break;
            sum += sm.at(nx, ny);
            ++count;
        }
    }
    return sum / count;
}

std::vector<int> postprocess_impl(const VesselnessResult& res, const std::vector<int>& idx,
                                  const std::vector<HessianField>& hessians) {
    const ScalarField2D& sm = res.scale_map;
    std::vector<int> out(idx.size(), 0);
    parallel_rows(sm.height, [&](int y) {
        for (int x = 0; x < sm.width; ++x) {
            std::size_t i = sm.idx(x, y);
            if (!res.segmentation[i]) {
                out[i] = 0; // background keeps sigma_min
                continue;
            }
            double mean = cross_section_mean(res, idx, hessians, x, y);
            out[i] = nearest_sigma_index(res.sigmas, mean);
        }
    });
    return out;
}

std::vector<int> indices_from_scale_map(const ScalarField2D& sm, const std::vector<double>& sigmas) {
    std::vector<int> idx(sm.size());
    for (std::size_t i = 0; i < sm.size(); ++i)
        idx[i] = nearest_sigma_index(sigmas, sm.data[i]);
    return idx;
}

} // namespace

std::vector<int> postprocess_scale_idx(const ScaleAnalysis& a, const ScalarField2D&) {
    return postprocess_impl(a.result, a.scale_idx, a.hessians);
}

ScalarField2D postprocess_scale_map(const VesselnessResult& result, const ScalarField2D& u) {
    bool any = false;
    for (auto s : result.segmentation)
        if (s) { any = true; break; }
    if (!any) throw parameter_error("postprocess_scale_map: empty segmentation");

    std::vector<int> idx = indices_from_scale_map(result.scale_map, result.sigmas);
    std::vector<HessianField> hessians;
    hessians.reserve(result.sigmas.size());
    for (double s : result.sigmas) hessians.push_back(hessian(gaussian_smooth(u, s)));

    std::vector<int> out = postprocess_impl(result, idx, hessians);
    ScalarField2D map(u.width, u.height, result.sigmas.front(), u.dx, u.dy);
    for (std::size_t i = 0; i < map.size(); ++i) map.data[i] = result.sigmas[out[i]];
    return map;
}

NormalizedHessianField normalized_hessian_at(const ScaleAnalysis& a,
                                             const std::vector<int>& scale_idx, double rho) {
    const ScalarField2D& ref = a.hessians.front().xx;
    const int w = ref.width, h = ref.height;
    HessianField n{ScalarField2D(w, h, 0.0, ref.dx, ref.dy),
                   ScalarField2D(w, h, 0.0, ref.dx, ref.dy),
                   ScalarField2D(w, h, 0.0, ref.dx, ref.dy)};
    parallel_rows(h, [&](int y) {
        for (int x = 0; x < w; ++x) {
            int si = scale_idx[ref.idx(x, y)];
            SymMat2 hm = a.hessians[si].at(x, y);
            Vec2 g = a.grads[si].at(x, y);
            double f = 1.0 / std::sqrt(1.0 + norm(g));
            n.xx.at(x, y) = f * hm.xx;
            n.xy.at(x, y) = f * hm.xy;
            n.yy.at(x, y) = f * hm.yy;
        }
    });
    if (rho > 0.0) {
        n.xx = gaussian_smooth(n.xx, rho);
        n.xy = gaussian_smooth(n.xy, rho);
        n.yy = gaussian_smooth(n.yy, rho);
    }
    return {n};
}

NormalizedHessianField normalized_hessian(const ScalarField2D& u,
                                          const ScalarField2D& sigma_map, double rho) {
    if (!u.same_dims(sigma_map)) throw parameter_error("sigma map dimensions must match image");
    // Distinct sigma values become the scale list of a throwaway analysis.
    std::vector<double> sigmas(sigma_map.data.begin(), sigma_map.data.end());
    std::sort(sigmas.begin(), sigmas.end());
    sigmas.erase(std::unique(sigmas.begin(), sigmas.end()), sigmas.end());
    if (sigmas.empty() || !(sigmas.front() > 0.0))
        throw parameter_error("sigma map values must be positive");

    ScaleAnalysis a;
    a.sigmas = sigmas;
    for (double s : sigmas) {
        ScalarField2D us = gaussian_smooth(u, s);
        a.grads.push_back(gradient(us));
        a.hessians.push_back(hessian(us));
    }
    std::vector<int> idx = indices_from_scale_map(sigma_map, sigmas);
    return normalized_hessian_at(a, idx, rho);
}

} // namespace crease
