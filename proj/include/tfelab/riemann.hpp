#pragma once

#include <string>
#include <vector>

#include "tfelab/core.hpp"
#include "tfelab/interface_ode.hpp"
#include "tfelab/solver.hpp"

namespace tfelab {

// u_eps(x,t) = eps * v(y,tau), y = x/eps^alpha, tau = t/eps^beta, beta = 4 alpha - n.
struct RescaleSpec {
    double alpha = 0.0;
    double epsilon = 1.0;
    double n = 1.0;
    double beta() const { return 4.0 * alpha - n; }
};

// Exact node-for-node relabeling onto the rescaled grid; inverse spec
// (1/epsilon) undoes it up to roundoff.
Field rescale(const Field& u, const RescaleSpec& spec);

struct SeparableResult {
    double P = 0.0;            // rho = C|y|^q balance coefficient, q = 4/n
    bool degenerate = false;   // a derivative factor vanishes identically
    bool has_positive_root = false;
    double C_star = 0.0;       // positive root of |C|^n P = -1 when it exists
    double residual_max = 0.0; // residual of rho = -div(|rho|^n grad lap rho) at probes
};

// Exact monomial differentiation of rho(y) = C |y|^{4/n} in radial
// coordinates (dimension N): P = q(q-2)(q+N-2)(q+N).
SeparableResult separable_residual(double n, int N, double C,
                                   const std::vector<double>& y_probe);

// |d/dt [n(T-t)]^{-1/n} - psi^{n+1}| at time t (the separable time factor).
double psi_blowup_identity_residual(double n, double T, double t);

struct BlowupReport {
    bool blew_up = false;        // sup ceiling reached and dt collapsed
    bool ceiling_hit = false;
    bool dt_collapsed = false;
    double T_estimate = 0.0;     // dt-collapse time
    double exponent_fit = 0.0;   // p in sup|v| ~ (T - t)^{-p}
    double fit_quality = 0.0;    // R^2 of the log-log fit
    int fit_samples = 0;
    bool unreliable = false;     // sup attained at the domain edge
    bool decayed = false;        // sup ended below its initial value
    SimStatus status = SimStatus::completed;
};

struct RiemannConfig {
    SolverConfig solver;          // boundary pinned by default, see make_default()
    double t_max = 4.0;           // give up if nothing happened by then
    double edge_fraction = 0.05;  // "sup at edge" detection band
    static RiemannConfig make_default();
};

// Runs v_t = -((1+v^2)^{n/2} v_yyy)_y from chi |y|^{4/n} data and fits the
// blow-up exponent from the sup history.
BlowupReport blowup_experiment(double n, double chi_plus, double chi_minus,
                               const Grid1D& domain, double ceiling,
                               const RiemannConfig& config = RiemannConfig::make_default());

struct StableInterfaceRow {
    double epsilon = 0.0;
    double window_sup = 0.0;
    bool blew_up = false;
    bool solver_ok = true;
};

// Data y^{3/n} phi_star(n/3 ln eps + ln y) per ladder entry; sup recorded over
// the window [window_lo, window_hi] over all snapshots up to t_final.
std::vector<StableInterfaceRow> stable_interface_experiment(
    double n, const OrbitResult& orbit, const std::vector<double>& eps_ladder,
    const Grid1D& domain, double t_final, double window_lo, double window_hi,
    const RiemannConfig& config = RiemannConfig::make_default());

}  // namespace tfelab
