#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "tfelab/core.hpp"

namespace tfelab {

using OdeState = std::array<double, 3>;  // (phi, phi', phi'')

// Right side of the interface oscillation equation with mu = 3/n:
//   phi''' = -[ 3(mu-1) phi'' + (3mu^2 - 6mu + 2) phi'
//               + mu(mu-1)(mu-2) phi + phi (phi^2 + zero_reg^2)^{-n/2} ].
// Requires n in (0,3). With zero_reg = 0 the singular term is
// sign(phi)|phi|^{1-n}: continuous through 0 for n < 1, rejected at phi = 0
// for n >= 1.
OdeState eqlc_rhs(const OdeState& state, double n, double zero_reg);

// Nonzero constant solutions: roots of mu(mu-1)(mu-2) + |phi|^{-n} = 0 found
// by bracketed root solve, residual-checked below 1e-12. Empty unless
// mu = 3/n lies in (1,2), i.e. n in (1.5, 3).
std::vector<double> equilibria(double n);

enum class OrbitMethod { forward_attractor, shooting };

struct OrbitSample {
    double s, phi, dphi, ddphi;
};

struct OrbitMeta {
    std::string method;
    double zero_reg = 0.0;
    int crossings = 0;
    double closure_error = 0.0;   // relative loop-closure mismatch
    long steps = 0;
    std::string note;
};

struct OrbitResult {
    double n = 0.0;
    double mu = 0.0;                  // 3/n
    double period = 0.0;
    std::vector<OrbitSample> samples; // one period, phase phi(0)=0, phi'(0)>0
    double amplitude = 0.0;
    bool converged = false;
    OrbitMeta method_meta;

    // periodic evaluation of phi_star(s) by cubic interpolation of samples
    double phi(double s) const;
};

struct OrbitOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double section_tol = 1e-6;      // relative agreement of successive returns
    double s_budget = 4000.0;
    long max_steps = 40000000;
    int n_samples = 2048;
    double zero_reg_override = -1.0;  // < 0: default 1e-8 * amplitude for n >= 1
};

OrbitResult find_periodic_orbit(double n, OrbitMethod method = OrbitMethod::forward_attractor,
                                const OrbitOptions& opts = {});

// Max-norm residual of the orbit samples against the ODE, with phi'''
// reconstructed by 4th-order central differences; scaled by the sample norm.
double orbit_equation_residual(const OrbitResult& orbit);

struct ScanRow {
    double n = 0.0;
    bool converged = false;
    double period = 0.0;
    double amplitude = 0.0;
};

struct ScanResult {
    double n_h_estimate = 0.0;
    double bracket_lo = 0.0;  // last n with a converged orbit
    double bracket_hi = 0.0;  // first n without
    bool fit_valid = false;
    double fit_value = 0.0;   // from period ~ a + b(-ln(n_h - n))
    std::vector<ScanRow> period_table;
};

// Scans n over [n_lo, n_hi] (subset of (1.5, 2.0), steps >= 8) for the
// heteroclinic bifurcation where the periodic orbit disappears.
ScanResult heteroclinic_scan(double n_lo, double n_hi, int steps,
                             const OrbitOptions& opts = {});

// Initial data x^{3/n} phi_star(ln x) built from a computed orbit.
Field sample_initial_data(const Grid1D& grid, const ModelParams& params,
                          const OrbitResult& orbit);

}  // namespace tfelab
