#include "crease/solver.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <numeric>

#include "crease/evaluate.hpp"
#include "crease/parallel.hpp"

namespace crease {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void MafodParams::validate() const {
    scale_cfg.validate();
    diff_cfg.validate();
    if (!(rho >= 0.0)) throw parameter_error("rho must be non-negative");
}

double stability_bound(double dx, double dy) {
    if (!(dx > 0.0) || !(dy > 0.0)) throw parameter_error("pixel edge lengths must be positive");
    return 2.0 / (16.0 * dx * dx + 16.0 * dy * dy + 2.0 * (dx * dy));
}

ScalarField2D assemble_flux(const ScalarField2D& u, const FourthOrderTensorField& d_field) {
    if (u.width != d_field.width || u.height != d_field.height)
        throw parameter_error("tensor field dimensions must match image");
    const int w = u.width, h = u.height;
    const double ixx = 1.0 / (u.dx * u.dx);
    const double iyy = 1.0 / (u.dy * u.dy);
    const double ixy = 1.0 / (4.0 * u.dx * u.dy);

    ScalarField2D txx(w, h, 0.0, u.dx, u.dy), txy = txx, tyx = txx, tyy = txx;
    parallel_rows(h, [&](int y) {
        for (int x = 0; x < w; ++x) {
            std::array<double, 4> hv{0.0, 0.0, 0.0, 0.0};
            if (fits_xx(x, y, w, h))
                hv[0] = (u.at(x - 1, y) - 2.0 * u.at(x, y) + u.at(x + 1, y)) * ixx;
            if (fits_xy(x, y, w, h))
                hv[1] = hv[2] = (u.at(x - 1, y - 1) + u.at(x + 1, y + 1)
                                 - u.at(x - 1, y + 1) - u.at(x + 1, y - 1)) * ixy;
            if (fits_yy(x, y, w, h))
                hv[3] = (u.at(x, y - 1) - 2.0 * u.at(x, y) + u.at(x, y + 1)) * iyy;
            const auto t = d_field.at(x, y).apply_raw(hv);
            txx.at(x, y) = t[0];
            txy.at(x, y) = t[1];
            tyx.at(x, y) = t[2];
            tyy.at(x, y) = t[3];
        }
    });
    return second_derivative_adjoint(txx, txy, tyx, tyy);
}

ScalarField2D explicit_step(const ScalarField2D& u, const FourthOrderTensorField& d_field,
                            double tau) {
    if (!(tau > 0.0)) throw parameter_error("step size must be positive");
    ScalarField2D flux = assemble_flux(u, d_field);
    ScalarField2D out = u;
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] -= tau * flux.data[i];
    return out;
}

int fed_substeps(double total_time, double cycles, double tau_max) {
    if (!(total_time > 0.0) || !(cycles > 0.0) || !(tau_max > 0.0))
        throw parameter_error("FED parameters must be positive");
    return static_cast<int>(
        std::ceil(-0.5 + 0.5 * std::sqrt(1.0 + 12.0 * total_time / (cycles * tau_max))));
}

std::vector<double> fed_taus(double total_time, double cycles, int n) {
    if (n < 1) throw parameter_error("FED sub-step count must be at least 1");
    std::vector<double> taus(n);
    const double scale = 3.0 * total_time / (2.0 * cycles * (static_cast<double>(n) * n + n));
    for (int i = 0; i < n; ++i) {
        const double c = std::cos(kPi * (2.0 * i + 1.0) / (4.0 * n + 2.0));
        taus[i] = scale / (c * c);
    }
    return taus;
}

std::vector<double> kappa_reorder(const std::vector<double>& taus) {
    const int n = static_cast<int>(taus.size());
    if (n <= 3) return taus;
    int kappa = 1;
    for (int k = n / 2; k >= 2; --k)
        if (std::gcd(k, n) == 1) {
            kappa = k;
            break;
        }
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = taus[(static_cast<long long>(i) * kappa) % n];
    return out;
}

FedSchedule make_fed_schedule(double total_time, int cycles, double tau_max) {
    if (cycles < 1) throw parameter_error("cycle count must be at least 1");
    FedSchedule s;
    s.total_time = total_time;
    s.cycles = cycles;
    s.tau_max = tau_max;
    s.substeps = fed_substeps(total_time, cycles, tau_max);
    s.taus = kappa_reorder(fed_taus(total_time, cycles, s.substeps));
    return s;
}

CycleObserver l2_stopper(const ScalarField2D& reference, int patience, ScalarField2D* best) {
    auto best_l2 = std::make_shared<double>(std::numeric_limits<double>::infinity());
    auto bad = std::make_shared<int>(0);
    return [&reference, patience, best, best_l2, bad](const CycleSnapshot& snap) {
        double d = l2_distance(reference, snap.u);
        if (d < *best_l2) {
            *best_l2 = d;
            *bad = 0;
            if (best) *best = snap.u;
        } else if (++*bad >= patience) {
            return false;
        }
        return true;
    };
}

ScalarField2D run_mafod(const ScalarField2D& u0, const MafodParams& params,
                        const FedSchedule& sched, const CycleObserver& observer) {
    params.validate();
    if (sched.taus.empty()) throw parameter_error("FED schedule has no sub-steps");

    ScalarField2D u = u0;
    double t = 0.0;
    for (int k = 1; k <= sched.cycles; ++k) {
        ScaleAnalysis analysis = analyze_scales(u, params.scale_cfg);
        std::vector<int> idx = postprocess_scale_idx(analysis, u);
        NormalizedHessianField nh = normalized_hessian_at(analysis, idx, params.rho);
        FourthOrderTensorField d_field = build_tensor_field(nh, params.diff_cfg);

        // P frozen across the cycle's sub-steps.
        for (double tau : sched.taus) {
            u = explicit_step(u, d_field, tau);
            t += tau;
        }
        if (!u.all_finite()) {
            char msg[128];
            std::snprintf(msg, sizeof msg,
                          "non-finite values after cycle %d (t=%.6g); reduce tau_max or T", k, t);
            throw numeric_error(msg);
        }
        if (params.log_progress)
            std::fprintf(stderr, "cycle=%d t=%.6g l2=%.9g\n", k, t, l2_norm(u));
        if (observer && !observer({k, t, u})) break;
    }
    return u;
}

} // namespace crease
