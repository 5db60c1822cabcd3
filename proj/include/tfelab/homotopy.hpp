#pragma once

#include <string>
#include <vector>

#include "tfelab/biharmonic.hpp"
#include "tfelab/core.hpp"
#include "tfelab/regularization.hpp"
#include "tfelab/solver.hpp"

namespace tfelab {

struct SweepRow {
    double n = 0.0;
    double epsilon = 0.0;
    double err0 = 0.0;        // ||u_{eps(n),n} - u~||_inf at t_final
    bool solver_ok = true;
    std::string note;
};

struct BranchingReport {
    double n = 0.0;
    double epsilon = 0.0;
    double err0 = 0.0;
    double err1 = 0.0;        // ||u - u~ - n phi1||_inf
    double ratio = 0.0;       // err1 / n
    bool solver_ok = true;
};

struct HomotopyConfig {
    SolverConfig solver;       // theta = 1/2 default here, see make_default()
    double core_fraction = 0.9;  // L-inf norms exclude the outermost nodes
    int phi1_s_nodes = 64;
    double clamp_eta = -1.0;   // < 0: default 1e-8 * sup|u~|
    static HomotopyConfig make_default();
};

// ||.||_inf over the interior core_fraction of the grid
double core_sup_norm(const Field& f, double core_fraction);
double core_sup_diff(const Field& a, const Field& b, double core_fraction);

// For each n in the (strictly decreasing, subset of (0, 0.5]) ladder: run the
// simple-mobility solver at eps(n) and compare with the kernel-convolution
// solution at t_final.
std::vector<SweepRow> homotopy_error_sweep(const Field& u0, const std::vector<double>& n_ladder,
                                           const Schedule& schedule, double t_final,
                                           const KernelTable& table,
                                           const HomotopyConfig& config = HomotopyConfig::make_default());

struct Phi1Result {
    std::vector<Field> fields;   // one per t_grid entry
    bool clamp_warning = false;  // clamped set with integrand weight > 5%
    double clamped_fraction = 0.0;
    double clamp_eta = 0.0;
};

// phi1(t) = -int_0^t grad b(t-s) * [ ln|u~(s)| u~_xxx(s) ] ds on a graded
// s-mesh accumulating at s = t; ln|u~| evaluated as ln(max(|u~|, eta)).
Phi1Result branching_correction_phi1(const Field& u0, const std::vector<double>& t_grid,
                                     const KernelTable& table, double clamp_eta,
                                     int s_nodes = 64);

// err1(n) = ||u_{eps(n),n} - u~ - n phi1||_inf and ratio = err1/n per ladder
// entry; fixed_epsilon >= 0 overrides the schedule (negative-control runs).
std::vector<BranchingReport> branching_order_check(const Field& u0, const std::vector<double>& n_ladder,
                                                   const Schedule& schedule, double t_final,
                                                   const KernelTable& table,
                                                   const HomotopyConfig& config = HomotopyConfig::make_default(),
                                                   double fixed_epsilon = -1.0);

}  // namespace tfelab
