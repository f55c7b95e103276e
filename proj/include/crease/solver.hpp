#ifndef CREASE_SOLVER_HPP
#define CREASE_SOLVER_HPP

#include <functional>
#include <vector>

#include "crease/field.hpp"
#include "crease/scale_select.hpp"
#include "crease/tensor.hpp"

namespace crease {

struct MafodParams {
    ScaleConfig scale_cfg;
    DiffusivityConfig diff_cfg;
    double rho = 0.5;
    bool log_progress = false; // "cycle=K t=T l2=V" lines on stderr

    void validate() const;
};

/// Explicit-scheme step size limit, 2/(16 dx^2 + 16 dy^2 + 2 dx dy);
/// 1/17 for unit pixels.
double stability_bound(double dx, double dy);

/// Matrix-free L^T D L u: forward second-derivative stencils, per-pixel
/// double contraction, adjoint accumulation of the stencil weights.
ScalarField2D assemble_flux(const ScalarField2D& u, const FourthOrderTensorField& d_field);

/// u - tau * L^T D L u.
ScalarField2D explicit_step(const ScalarField2D& u, const FourthOrderTensorField& d_field,
                            double tau);

/// Number of sub-steps per FED cycle, ceil(-0.5 + 0.5*sqrt(1 + 12T/(M tau_max))).
int fed_substeps(double total_time, double cycles, double tau_max);

/// tau_i = 3T / (2M (n^2+n) cos^2(pi (2i+1)/(4n+2))), i = 0..n-1.
std::vector<double> fed_taus(double total_time, double cycles, int n);

/// kappa-cycle reordering: visit 0, kappa, 2*kappa, ... mod n with kappa the
/// largest integer <= n/2 coprime to n (1 for n <= 3).
std::vector<double> kappa_reorder(const std::vector<double>& taus);

struct FedSchedule {
    double total_time = 0.0; // T
    int cycles = 0;          // M
    double tau_max = 0.05;
    int substeps = 0;                // n
    std::vector<double> taus;        // reordered, length n, sums to T/M
};

FedSchedule make_fed_schedule(double total_time, int cycles, double tau_max = 0.05);

struct CycleSnapshot {
    int cycle;       // 1-based, after completion
    double time;     // elapsed diffusion time
    const ScalarField2D& u;
};

/// Return false to stop after the current cycle.
using CycleObserver = std::function<bool(const CycleSnapshot&)>;

/// Observer that tracks the l2 distance to a reference image and stops once
/// it has not improved for `patience` cycles. The best iterate is copied to
/// *best if given.
CycleObserver l2_stopper(const ScalarField2D& reference, int patience = 3,
                         ScalarField2D* best = nullptr);

/// MAFOD evolution: each cycle re-runs scale selection + postprocessing on
/// the current iterate, freezes the per-pixel fourth-order tensors, then
/// applies the cycle's sub-steps. Throws numeric_error on non-finite values.
ScalarField2D run_mafod(const ScalarField2D& u0, const MafodParams& params,
                        const FedSchedule& sched, const CycleObserver& observer = {});

} // namespace crease

#endif
