#include "tfelab/homotopy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tfelab {

HomotopyConfig HomotopyConfig::make_default() {
    HomotopyConfig c;
    c.solver.theta = 0.5;        // the sweeps compare against the exact flow,
    c.solver.dt_initial = 5e-5;  // so favor the second-order-in-time scheme
    c.solver.dt_max = 5e-5;
    c.solver.newton_tol = 1e-11;
    return c;
}

double core_sup_norm(const Field& f, double core_fraction) {
    const int n = f.grid.n_nodes();
    const int skip = static_cast<int>(std::floor(0.5 * (1.0 - core_fraction) * n));
    double m = 0.0;
    for (int i = skip; i < n - skip; ++i) m = std::max(m, std::abs(f.values[i]));
    return m;
}

double core_sup_diff(const Field& a, const Field& b, double core_fraction) {
    if (a.values.size() != b.values.size())
        throw std::invalid_argument("core_sup_diff: mismatched grids");
    const int n = a.grid.n_nodes();
    const int skip = static_cast<int>(std::floor(0.5 * (1.0 - core_fraction) * n));
    double m = 0.0;
    for (int i = skip; i < n - skip; ++i)
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

namespace {

void validate_ladder(const std::vector<double>& ladder) {
    if (ladder.empty()) throw std::invalid_argument("n ladder is empty");
    double prev = std::numeric_limits<double>::infinity();
    for (double n : ladder) {
        if (!(n > 0.0) || n > 0.5)
            throw std::invalid_argument("n ladder entries must lie in (0, 0.5]");
        if (!(n < prev)) throw std::invalid_argument("n ladder must be strictly decreasing");
        prev = n;
    }
}

// node-centered third derivative, zero at the outermost two nodes
std::vector<double> third_derivative(const Field& f) {
    const int n = f.grid.n_nodes();
    const double h = f.grid.spacing();
    std::vector<double> d3(n, 0.0);
    for (int i = 2; i + 2 < n; ++i)
        d3[i] = (f.values[i + 2] - 2.0 * f.values[i + 1] + 2.0 * f.values[i - 1] -
                 f.values[i - 2]) / (2.0 * h * h * h);
    return d3;
}

}  // namespace

std::vector<SweepRow> homotopy_error_sweep(const Field& u0, const std::vector<double>& n_ladder,
                                           const Schedule& schedule, double t_final,
                                           const KernelTable& table, const HomotopyConfig& config) {
    validate_ladder(n_ladder);
    if (!(t_final > 0.0)) throw std::invalid_argument("homotopy_error_sweep: t_final must be positive");
    const Field ut = biharmonic_solve(u0, t_final, table);
    std::vector<SweepRow> rows;
    for (double n : n_ladder) {
        SweepRow row;
        row.n = n;
        row.epsilon = schedule.epsilon_of(n);
        ModelParams params{n, row.epsilon, MobilityFamily::simple};
        const SimResult sim = simulate(u0, params, t_final, config.solver, {t_final});
        if (sim.status != SimStatus::completed || sim.trajectory.snapshots.empty()) {
            row.solver_ok = false;
            row.note = to_string(sim.status);
        } else {
            row.err0 = core_sup_diff(sim.trajectory.snapshots.back(), ut, config.core_fraction);
        }
        rows.push_back(row);
    }
    return rows;
}

Phi1Result branching_correction_phi1(const Field& u0, const std::vector<double>& t_grid,
                                     const KernelTable& table, double clamp_eta, int s_nodes) {
    if (t_grid.empty()) throw std::invalid_argument("branching_correction_phi1: empty t grid");
    double prev = 0.0;
    for (double t : t_grid) {
        if (!(t > prev)) throw std::invalid_argument("branching_correction_phi1: t grid must be positive increasing");
        prev = t;
    }
    if (s_nodes < 8) throw std::invalid_argument("branching_correction_phi1: too few s nodes");

    Phi1Result out;
    const int nx = u0.grid.n_nodes();
    const double h = u0.grid.spacing();
    const double Y = table.y_grid.x_max;
    // below this; the discrete convolution under-resolves the kernel and the
    // flat asymptotic value of the integrand takes over
    const double tau_min = std::pow(8.0 * h / Y, 4.0);

    long clamped_weighted = 0, weighted = 0;
    double eta_used = 0.0;

    for (double t : t_grid) {
        // graded mesh s_j = t (1 - ((m-j)/m)^2): quadratic accumulation at
        // s = t absorbs the sqrt(t-s) behaviour of the integrand
        const int m = s_nodes;
        std::vector<double> svals(m + 1);
        for (int j = 0; j <= m; ++j) {
            const double r = static_cast<double>(m - j) / m;
            svals[j] = t * (1.0 - r * r);
        }
        std::vector<std::vector<double>> integrand(m + 1, std::vector<double>(nx, 0.0));
        for (int j = 0; j <= m; ++j) {
            const double s = svals[j];
            const Field us = s == 0.0 ? u0 : biharmonic_solve(u0, s, table);
            const double sup = us.sup_norm();
            const double eta = clamp_eta > 0.0 ? clamp_eta : 1e-8 * std::max(sup, 1e-300);
            eta_used = eta;
            const std::vector<double> d3 = third_derivative(us);
            double d3max = 0.0;
            for (double v : d3) d3max = std::max(d3max, std::abs(v));
            std::vector<double> g(nx);
            for (int i = 0; i < nx; ++i) {
                const double au = std::abs(us.values[i]);
                g[i] = std::log(std::max(au, eta)) * d3[i];
                if (std::abs(d3[i]) > 1e-12 * d3max) {
                    ++weighted;
                    if (au < eta) ++clamped_weighted;
                }
            }
            const double tau = t - s;
            if (tau >= tau_min) {
                const double scale = std::pow(tau, -0.25);
                const double pref = std::pow(tau, -0.5) * h;
                for (int i = 0; i < nx; ++i) {
                    const double x = u0.grid.node(i);
                    double acc = 0.0;
                    for (int z = 0; z < nx; ++z) {
                        if (g[z] == 0.0) continue;
                        acc += table.eval_derivative((x - u0.grid.node(z)) * scale) * g[z];
                    }
                    integrand[j][i] = pref * acc;
                }
            } else {
                // grad b integrates to a delta'-like limit: the convolution
                // tends to d/dx g as tau -> 0
                for (int i = 1; i + 1 < nx; ++i)
                    integrand[j][i] = (g[i + 1] - g[i - 1]) / (2.0 * h);
            }
        }
        Field phi1 = make_field(u0.grid, t);
        for (int j = 1; j <= m; ++j) {
            const double ds = svals[j] - svals[j - 1];
            for (int i = 0; i < nx; ++i)
                phi1.values[i] -= 0.5 * ds * (integrand[j][i] + integrand[j - 1][i]);
        }
        out.fields.push_back(std::move(phi1));
    }
    out.clamp_eta = eta_used;
    out.clamped_fraction = weighted > 0 ? static_cast<double>(clamped_weighted) / weighted : 0.0;
    out.clamp_warning = out.clamped_fraction > 0.05;
    return out;
}

std::vector<BranchingReport> branching_order_check(const Field& u0, const std::vector<double>& n_ladder,
                                                   const Schedule& schedule, double t_final,
                                                   const KernelTable& table,
                                                   const HomotopyConfig& config, double fixed_epsilon) {
    validate_ladder(n_ladder);
    if (!(t_final > 0.0)) throw std::invalid_argument("branching_order_check: t_final must be positive");
    const Field ut = biharmonic_solve(u0, t_final, table);
    const Phi1Result p1 = branching_correction_phi1(u0, {t_final}, table, config.clamp_eta,
                                                    config.phi1_s_nodes);
    const Field& phi1 = p1.fields.front();

    std::vector<BranchingReport> rows;
    for (double n : n_ladder) {
        BranchingReport r;
        r.n = n;
        r.epsilon = fixed_epsilon >= 0.0 ? fixed_epsilon : schedule.epsilon_of(n);
        ModelParams params{n, r.epsilon, MobilityFamily::simple};
        const SimResult sim = simulate(u0, params, t_final, config.solver, {t_final});
        if (sim.status != SimStatus::completed || sim.trajectory.snapshots.empty()) {
            r.solver_ok = false;
            rows.push_back(r);
            continue;
        }
        const Field& un = sim.trajectory.snapshots.back();
        r.err0 = core_sup_diff(un, ut, config.core_fraction);
        Field resid = un;
        for (size_t i = 0; i < resid.values.size(); ++i)
            resid.values[i] -= ut.values[i] + n * phi1.values[i];
        r.err1 = core_sup_norm(resid, config.core_fraction);
        r.ratio = r.err1 / n;
        rows.push_back(r);
    }
    return rows;
}

}  // namespace tfelab
