#include "tfelab/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "tfelab/io.hpp"

namespace tfelab {

bool Grid1D::symmetric_about_zero(double rel_tol) const {
    return std::abs(x_min + x_max) <= rel_tol * (x_max - x_min);
}

Grid1D make_grid(double x_min, double x_max, int n_cells) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max))
        throw std::invalid_argument("make_grid: non-finite bounds");
    if (!(x_min < x_max))
        throw std::invalid_argument("make_grid: empty interval (x_min >= x_max)");
    if (n_cells < 8)
        throw std::invalid_argument("make_grid: n_cells must be >= 8");
    return Grid1D{x_min, x_max, n_cells};
}

const char* to_string(MobilityFamily f) {
    switch (f) {
        case MobilityFamily::degenerate: return "degenerate";
        case MobilityFamily::simple: return "simple";
        case MobilityFamily::homotopy: return "homotopy";
        case MobilityFamily::unit: return "unit";
    }
    return "?";
}

MobilityFamily mobility_family_from_string(const std::string& s) {
    if (s == "degenerate") return MobilityFamily::degenerate;
    if (s == "simple") return MobilityFamily::simple;
    if (s == "homotopy") return MobilityFamily::homotopy;
    if (s == "unit") return MobilityFamily::unit;
    throw std::invalid_argument("unknown mobility family: " + s);
}

void ModelParams::validate() const {
    if (!std::isfinite(n) || n <= 0.0)
        throw std::invalid_argument("ModelParams: n must be positive and finite");
    if (!std::isfinite(epsilon) || epsilon < 0.0 || epsilon > 1.0)
        throw std::invalid_argument("ModelParams: epsilon must lie in [0,1]");
    if (mobility == MobilityFamily::degenerate && epsilon != 0.0)
        throw std::invalid_argument("ModelParams: degenerate mobility requires epsilon = 0");
}

double Field::sup_norm() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

void Field::check_finite() const {
    for (double v : values)
        if (!std::isfinite(v)) throw std::runtime_error("Field: non-finite value");
}

Field make_field(const Grid1D& grid, double time) {
    Field f;
    f.grid = grid;
    f.values.assign(grid.n_nodes(), 0.0);
    f.time = time;
    return f;
}

double discrete_mass(const Field& f, bool periodic) {
    const int m = periodic ? f.grid.n_cells : f.grid.n_nodes();
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += f.values[i];
    return s * f.grid.spacing();
}

double trapezoid(const Field& f) {
    const int n = f.grid.n_nodes();
    double s = 0.5 * (f.values[0] + f.values[n - 1]);
    for (int i = 1; i + 1 < n; ++i) s += f.values[i];
    return s * f.grid.spacing();
}

double smooth_bump_value(double x, double center, double width, double height) {
    const double r = (x - center) / width;
    const double r2 = r * r;
    if (r2 >= 1.0) return 0.0;
    return height * std::exp(1.0 - 1.0 / (1.0 - r2));
}

Field sample_smooth_bump(const Grid1D& grid, double center, double width, double height) {
    if (!(width > 0.0)) throw std::invalid_argument("smooth_bump: width must be positive");
    Field f = make_field(grid);
    for (int i = 0; i < grid.n_nodes(); ++i)
        f.values[i] = smooth_bump_value(grid.node(i), center, width, height);
    return f;
}

Field sample_riemann(const Grid1D& grid, double n, double chi_plus, double chi_minus) {
    if (!(n > 0.0)) throw std::invalid_argument("sample_riemann: n must be positive");
    const double q = 4.0 / n;
    Field f = make_field(grid);
    for (int i = 0; i < grid.n_nodes(); ++i) {
        const double x = grid.node(i);
        if (x == 0.0) continue;
        f.values[i] = (x > 0.0 ? chi_plus : chi_minus) * std::pow(std::abs(x), q);
    }
    return f;
}

Field sample_interface_data(const Grid1D& grid, double n,
                            const std::function<double(double)>& phi_star,
                            double phase_shift) {
    if (!(n > 0.0)) throw std::invalid_argument("sample_interface_data: n must be positive");
    if (!phi_star) throw std::invalid_argument("sample_interface_data: no oscillation profile supplied");
    const double mu = 3.0 / n;
    Field f = make_field(grid);
    for (int i = 0; i < grid.n_nodes(); ++i) {
        const double x = grid.node(i);
        if (x <= 0.0) continue;
        f.values[i] = std::pow(x, mu) * phi_star(phase_shift + std::log(x));
    }
    return f;
}

const char* to_string(BoundaryMode b) {
    switch (b) {
        case BoundaryMode::periodic: return "periodic";
        case BoundaryMode::decay_clamped: return "decay_clamped";
        case BoundaryMode::pinned: return "pinned";
    }
    return "?";
}

void Trajectory::check_invariants() const {
    for (size_t k = 1; k < snapshots.size(); ++k) {
        if (!(snapshots[k].time > snapshots[k - 1].time))
            throw std::runtime_error("Trajectory: snapshot times not strictly increasing");
        if (snapshots[k].grid.n_cells != snapshots[0].grid.n_cells ||
            snapshots[k].grid.x_min != snapshots[0].grid.x_min ||
            snapshots[k].grid.x_max != snapshots[0].grid.x_max)
            throw std::runtime_error("Trajectory: snapshots do not share one grid");
    }
}

void write_field_csv(std::ostream& os, const Field& f) {
    os << "x,u\n";
    for (int i = 0; i < f.grid.n_nodes(); ++i)
        os << format_g17(f.grid.node(i)) << ',' << format_g17(f.values[i]) << '\n';
}

std::string field_csv(const Field& f) {
    std::ostringstream os;
    write_field_csv(os, f);
    return os.str();
}

Field read_field_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("x,u", 0) != 0)
        throw std::runtime_error("field csv: bad header");
    std::vector<double> xs, us;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("field csv: bad row");
        xs.push_back(std::stod(line.substr(0, comma)));
        us.push_back(std::stod(line.substr(comma + 1)));
    }
    if (xs.size() < 2) throw std::runtime_error("field csv: too few rows");
    Field f;
    f.grid = Grid1D{xs.front(), xs.back(), static_cast<int>(xs.size()) - 1};
    f.values = std::move(us);
    return f;
}

}  // namespace tfelab
