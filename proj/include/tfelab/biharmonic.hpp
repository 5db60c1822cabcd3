#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tfelab/core.hpp"

namespace tfelab {

// |F(y)| <= prefactor * exp(-a |y|^{4/3}), least-squares fit through the
// local extrema of the tabulated kernel.
struct EnvelopeFit {
    double a = 0.0;
    double prefactor = 0.0;
    double r_squared = 0.0;
    int n_extrema = 0;
    bool valid = false;
};

// Tabulated kernel F of the fundamental solution b(x,t) = t^{-N/4} F(x t^{-1/4}).
// The table is normalized so that its discrete N-volume integral is 1;
// raw_integral keeps the pre-normalization quadrature value.
struct KernelTable {
    int dimension = 1;
    Grid1D y_grid;                 // symmetric about 0 (1D) or [0, R] radial
    std::vector<double> F;         // normalized values, one per node
    std::vector<double> dF;        // dF/dy from 4th-order differences of F
    double normalization = 1.0;    // discrete integral of the stored table
    double raw_integral = 0.0;     // discrete integral before normalization
    EnvelopeFit envelope;
    double quadrature_tol = 0.0;
    double achieved_error = 0.0;   // max panel-refinement discrepancy over nodes

    int n_nodes() const { return y_grid.n_nodes(); }
    // cubic 4-point interpolation; 0 outside the table
    double eval(double y) const;
    double eval_derivative(double y) const;
    // estimated |F| mass beyond the table edge, from the envelope fit
    double tail_mass_estimate() const;
    int sign_changes(double y_abs_max) const;
};

// F(y) = (1/pi) int_0^inf exp(-xi^4) cos(xi y) dxi per node, panel-adaptive
// Gauss-Legendre to quadrature_tol. Requires a grid symmetric about 0.
KernelTable kernel_1d(const Grid1D& y_grid, double quadrature_tol);

// Radial profile in dimension N (1, 2 or 3) on r_grid (r >= 0), normalized so
// the N-volume integral omega_{N-1} int F r^{N-1} dr equals 1.
KernelTable kernel_radial(int N, const Grid1D& r_grid, double quadrature_tol);

// Max-norm residual of F''' = y F / 4 over interior nodes (second-order
// central third difference). Requires dimension 1 and >= 4 interior stencil
// widths.
double kernel_residual(const KernelTable& table);

struct ConvolveInfo {
    bool data_truncation_warning = false;  // |u0| > 1e-12 * sup at domain ends
    double missing_mass_estimate = 0.0;
};

// u~(x,t) = t^{-1/4} int F((x-z) t^{-1/4}) u0(z) dz, direct discrete
// convolution with zero padding. Throws if the kernel support at time t
// exceeds the table with estimated missing mass > 1e-6.
Field biharmonic_solve(const Field& u0, double t, const KernelTable& table,
                       ConvolveInfo* info = nullptr);

// CSV "y,F" plus JSON sidecar with normalization, envelope and quadrature
// metadata.
void write_kernel_csv(std::ostream& os, const KernelTable& table);
std::string kernel_sidecar_json(const KernelTable& table);

}  // namespace tfelab
