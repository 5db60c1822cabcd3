#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace tfelab {

// Uniform 1D grid. Node i sits at x_min + i*spacing(), i = 0..n_cells.
struct Grid1D {
    double x_min = 0.0;
    double x_max = 1.0;
    int n_cells = 8;

    double spacing() const { return (x_max - x_min) / n_cells; }
    int n_nodes() const { return n_cells + 1; }
    double node(int i) const { return x_min + i * spacing(); }
    bool symmetric_about_zero(double rel_tol = 1e-12) const;
};

Grid1D make_grid(double x_min, double x_max, int n_cells);

enum class MobilityFamily { degenerate, simple, homotopy, unit };

const char* to_string(MobilityFamily f);
MobilityFamily mobility_family_from_string(const std::string& s);

// Exponent n, regularization epsilon and the mobility family phi_eps.
// degenerate: |u|^n (requires epsilon = 0)
// simple:     (eps^2 + u^2)^{n/2}
// homotopy:   eps^n + (1-eps)(eps^2 + u^2)^{n/2}
// unit:       1
struct ModelParams {
    double n = 1.0;
    double epsilon = 0.0;
    MobilityFamily mobility = MobilityFamily::unit;

    void validate() const;  // throws std::invalid_argument on violation
};

// Spatial profile on a grid at a fixed time.
struct Field {
    Grid1D grid;
    std::vector<double> values;
    double time = 0.0;

    double sup_norm() const;
    void check_finite() const;  // throws if any entry is not finite
};

Field make_field(const Grid1D& grid, double time = 0.0);

// Quadrature used consistently by the solver and the diagnostics:
// rectangle sum h*sum(u_i) over the active nodes (the flux-form scheme
// conserves exactly this sum).
double discrete_mass(const Field& f, bool periodic);

// Trapezoid integral over all nodes, for generic diagnostics integrals.
double trapezoid(const Field& f);

// --- initial data ---------------------------------------------------------

// C-infinity bump: height * exp(1 - 1/(1 - r^2)), r = (x-center)/width,
// identically zero for |r| >= 1.
double smooth_bump_value(double x, double center, double width, double height);
Field sample_smooth_bump(const Grid1D& grid, double center, double width, double height);

// chi_plus * |x|^{4/n} for x > 0, chi_minus * |x|^{4/n} for x < 0.
Field sample_riemann(const Grid1D& grid, double n, double chi_plus, double chi_minus);

// x^{3/n} * phi_star(ln x) for x > 0, zero otherwise.
Field sample_interface_data(const Grid1D& grid, double n,
                            const std::function<double(double)>& phi_star,
                            double phase_shift = 0.0);

// --- per-step solver log / trajectory --------------------------------------

enum class BoundaryMode { periodic, decay_clamped, pinned };
const char* to_string(BoundaryMode b);

struct StepLogEntry {
    double t_end = 0.0;
    double dt = 0.0;
    int newton_iterations = 0;
    double residual = 0.0;
};

struct Trajectory {
    std::vector<Field> snapshots;          // strictly increasing times, shared grid
    std::vector<StepLogEntry> step_log;
    ModelParams params;
    BoundaryMode boundary = BoundaryMode::decay_clamped;
    double theta = 1.0;

    void check_invariants() const;
};

// --- CSV -------------------------------------------------------------------

// header "x,u", one row per node, 17 significant digits
void write_field_csv(std::ostream& os, const Field& f);
std::string field_csv(const Field& f);
Field read_field_csv(std::istream& is);

}  // namespace tfelab
