#pragma once

#include <optional>
#include <vector>

#include "tfelab/core.hpp"

namespace tfelab {

// Mass, energies and flux norms of one snapshot; cumulative dissipation is
// accumulated trapezoidally from the previous report.
struct EnergyReport {
    double time = 0.0;
    double mass = 0.0;                  // solver quadrature, bit-identical
    double gradient_energy = 0.0;       // (1/2) sum_faces ((u_{i+1}-u_i)/h)^2 h
    double cumulative_dissipation = 0.0;  // int_0^t int phi_eps |u_xxx|^2
    double dissipation_rate = 0.0;      // instantaneous int phi_eps |u_xxx|^2
    double flux_norm_sq = 0.0;          // int |h_eps|^2, h_eps = phi_eps u_xxx
};

EnergyReport energy_report(const Field& state, const ModelParams& params,
                           BoundaryMode boundary,
                           const EnergyReport* accumulated = nullptr);

std::vector<EnergyReport> energy_reports(const Trajectory& traj);

// Max over snapshots of |E(t) + D(t) - E(0)| for the discrete energy
// identity (gradient energy plus cumulative dissipation is conserved).
double energy_identity_residual(const Trajectory& traj, const ModelParams& params);

// Compactly supported space-time test function with analytic derivatives.
class TestFunction {
public:
    enum class Kind { sine_packet, bump_product };

    static TestFunction bump_product(double x0, double wx, double t0, double wt);
    static TestFunction sine_packet(double x0, double wx, double t0, double wt, double k);

    double value(double x, double t) const;
    double dx(double x, double t) const;
    double dt(double x, double t) const;
    Kind kind() const { return kind_; }

private:
    TestFunction(Kind kind, double x0, double wx, double t0, double wt, double k);
    Kind kind_;
    double x0_, wx_, t0_, wt_, k_;
};

struct WeakFormResidual {
    double total = 0.0;        // discrete weak-form identity value
    double eps_term = 0.0;     // |eps^n  int int  phi_x u_xxx|        (homotopy family)
    double bad_set_term = 0.0; // |contribution over faces with |u| <= delta|
};

WeakFormResidual weak_form_residual(const Trajectory& traj, const ModelParams& params,
                                    const TestFunction& test, double delta);

struct SideFit {
    double exponent = 0.0;
    double r_squared = 0.0;
    int n_points = 0;
};

struct OscillationProfile {
    double time = 0.0;
    int sign_changes = 0;
    double interface_left = 0.0;    // outermost |u| > tol crossings
    double interface_right = 0.0;
    std::optional<double> envelope_exponent;  // absent when < 3 usable extrema
    std::optional<SideFit> left_fit;
    std::optional<SideFit> right_fit;
    bool empty = false;             // no node above tol
};

// Sign changes counted between consecutive nodes with |u| > tol on both
// sides; envelope exponent from ln|extrema| vs ln(distance to interface)
// over the extrema nearest each interface (better-R^2 side reported).
// tol <= 0 selects the default 1e-9 * sup|u|.
OscillationProfile oscillation_profile(const Field& state, double tol);

}  // namespace tfelab
