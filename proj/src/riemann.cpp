#include "tfelab/riemann.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tfelab {

Field rescale(const Field& u, const RescaleSpec& spec) {
    if (!(spec.epsilon > 0.0)) throw std::invalid_argument("rescale: epsilon must be positive");
    u.check_finite();
    const double xs = std::pow(spec.epsilon, spec.alpha);
    const double ts = std::pow(spec.epsilon, spec.beta());
    Field v;
    v.grid = Grid1D{u.grid.x_min / xs, u.grid.x_max / xs, u.grid.n_cells};
    const double span = std::max(std::abs(v.grid.x_min), std::abs(v.grid.x_max));
    if (!std::isfinite(span) || span > 1e12)
        throw std::runtime_error("rescale: rescaled domain overflows the supported range");
    v.values.resize(u.values.size());
    for (size_t i = 0; i < u.values.size(); ++i) v.values[i] = u.values[i] / spec.epsilon;
    v.time = u.time / ts;
    return v;
}

SeparableResult separable_residual(double n, int N, double C,
                                   const std::vector<double>& y_probe) {
    if (!(n > 0.0)) throw std::invalid_argument("separable_residual: n must be positive");
    if (N < 1 || N > 3) throw std::invalid_argument("separable_residual: N must be 1, 2 or 3");
    if (C == 0.0) throw std::invalid_argument("separable_residual: C must be nonzero");
    for (double y : y_probe)
        if (!(std::abs(y) > 0.0))
            throw std::invalid_argument("separable_residual: probes must avoid y = 0");

    SeparableResult out;
    const double q = 4.0 / n;
    // rho = C r^q:
    //   lap rho            = C q (q + N - 2) r^{q-2}
    //   d/dr lap rho       = C q (q + N - 2)(q - 2) r^{q-3}
    //   |rho|^n d/dr lap   = |C|^n C q (q+N-2)(q-2) r^{q+1}      (q n = 4)
    //   div(...)           = |C|^n C q (q+N-2)(q-2)(q+N) r^q
    out.P = q * (q - 2.0) * (q + N - 2.0) * (q + N);
    out.degenerate = std::abs(out.P) < 1e-14 * std::max(1.0, q * q * q * q);
    if (!out.degenerate && out.P < 0.0) {
        out.has_positive_root = true;
        out.C_star = std::pow(-1.0 / out.P, 1.0 / n);
    }
    const double factor = std::abs(C) * std::abs(1.0 + std::pow(std::abs(C), n) * out.P);
    for (double y : y_probe)
        out.residual_max = std::max(out.residual_max, factor * std::pow(std::abs(y), q));
    return out;
}

double psi_blowup_identity_residual(double n, double T, double t) {
    if (!(n > 0.0) || !(T > t)) throw std::invalid_argument("psi identity: need n > 0, t < T");
    const double psi = std::pow(n * (T - t), -1.0 / n);
    const double dpsi = std::pow(n * (T - t), -(n + 1.0) / n);
    return std::abs(dpsi - std::pow(psi, n + 1.0));
}

RiemannConfig RiemannConfig::make_default() {
    RiemannConfig c;
    // the far-field data grows, so the ends are held at their initial values;
    // zero-flux truncation makes the discrete flow dissipative and cannot
    // reproduce growth fed from large |y|
    c.solver.boundary = BoundaryMode::pinned;
    c.solver.dt_initial = 1e-6;
    c.solver.dt_max = 2e-3;
    c.solver.dt_min = 1e-13;
    c.solver.newton_tol = 1e-9;
    c.solver.theta = 1.0;
    return c;
}

BlowupReport blowup_experiment(double n, double chi_plus, double chi_minus,
                               const Grid1D& domain, double ceiling,
                               const RiemannConfig& config) {
    if (!(n > 0.0)) throw std::invalid_argument("blowup_experiment: n must be positive");
    if (!(ceiling > 0.0)) throw std::invalid_argument("blowup_experiment: ceiling must be positive");
    const Field v0 = sample_riemann(domain, n, chi_plus, chi_minus);
    const double sup0 = v0.sup_norm();

    BlowupReport rep;
    if (sup0 == 0.0) {  // zero data stays zero
        rep.status = SimStatus::completed;
        return rep;
    }
    SolverConfig sc = config.solver;
    sc.blowup_ceiling_factor = ceiling / sup0;
    ModelParams params{n, 1.0, MobilityFamily::simple};  // (1 + v^2)^{n/2}
    const SimResult sim = simulate(v0, params, config.t_max, sc, {}, /*stop_at_ceiling=*/false);

    rep.status = sim.status;
    rep.ceiling_hit = sim.ceiling_hit;
    rep.dt_collapsed = sim.status == SimStatus::dt_collapse;
    rep.blew_up = rep.ceiling_hit && rep.dt_collapsed;
    rep.T_estimate = rep.dt_collapsed ? sim.t_end : 0.0;
    const double sup_end = sim.sup_history.back().second;
    rep.decayed = sup_end < 0.9 * sup0;

    // sup attained at the domain edge makes the growth a truncation artifact
    if (!sim.final_state.values.empty()) {
        const int nn = sim.final_state.grid.n_nodes();
        int arg = 0;
        for (int i = 1; i < nn; ++i)
            if (std::abs(sim.final_state.values[i]) > std::abs(sim.final_state.values[arg])) arg = i;
        const int band = std::max(1, static_cast<int>(config.edge_fraction * nn));
        rep.unreliable = arg < band || arg >= nn - band;
    }

    if (rep.blew_up) {
        // last decade of sup|v| against (T - t), excluding the final 10% of
        // the time window where truncation distorts the growth
        double sup_max = 0.0;
        for (const auto& [t, s] : sim.sup_history) sup_max = std::max(sup_max, s);
        std::vector<std::pair<double, double>> window;
        double t_w0 = -1.0;
        for (const auto& [t, s] : sim.sup_history) {
            if (s >= 0.1 * sup_max && t < rep.T_estimate) {
                if (t_w0 < 0.0) t_w0 = t;
                window.emplace_back(t, s);
            }
        }
        std::vector<double> lx, ly;
        for (const auto& [t, s] : window) {
            if (rep.T_estimate - t < 0.1 * (rep.T_estimate - t_w0)) continue;
            lx.push_back(std::log(rep.T_estimate - t));
            ly.push_back(std::log(s));
        }
        rep.fit_samples = static_cast<int>(lx.size());
        if (rep.fit_samples >= 6) {
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            const int m = rep.fit_samples;
            for (int i = 0; i < m; ++i) {
                sx += lx[i]; sy += ly[i]; sxx += lx[i] * lx[i]; sxy += lx[i] * ly[i];
            }
            const double denom = m * sxx - sx * sx;
            if (denom != 0.0) {
                const double slope = (m * sxy - sx * sy) / denom;
                const double icpt = (sy - slope * sx) / m;
                double ss_res = 0.0, ss_tot = 0.0;
                const double ybar = sy / m;
                for (int i = 0; i < m; ++i) {
                    const double p = slope * lx[i] + icpt;
                    ss_res += (ly[i] - p) * (ly[i] - p);
                    ss_tot += (ly[i] - ybar) * (ly[i] - ybar);
                }
                rep.exponent_fit = -slope;
                rep.fit_quality = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
            }
        }
    }
    return rep;
}

std::vector<StableInterfaceRow> stable_interface_experiment(
    double n, const OrbitResult& orbit, const std::vector<double>& eps_ladder,
    const Grid1D& domain, double t_final, double window_lo, double window_hi,
    const RiemannConfig& config) {
    if (!orbit.converged)
        throw std::invalid_argument("stable_interface_experiment: orbit did not converge");
    if (eps_ladder.empty()) throw std::invalid_argument("stable_interface_experiment: empty ladder");
    double prev = std::numeric_limits<double>::infinity();
    for (double e : eps_ladder) {
        if (!(e > 0.0) || !(e < prev))
            throw std::invalid_argument("stable_interface_experiment: ladder must be positive decreasing");
        prev = e;
    }
    if (!(window_lo < window_hi))
        throw std::invalid_argument("stable_interface_experiment: bad window");

    std::vector<StableInterfaceRow> rows;
    for (double eps : eps_ladder) {
        StableInterfaceRow row;
        row.epsilon = eps;
        const double phase = n / 3.0 * std::log(eps);
        const Field v0 = sample_interface_data(domain, n,
                                               [&](double s) { return orbit.phi(s); }, phase);
        ModelParams params{n, 1.0, MobilityFamily::simple};
        std::vector<double> snaps;
        for (int k = 1; k <= 8; ++k) snaps.push_back(t_final * k / 8.0);
        const SimResult sim = simulate(v0, params, t_final, config.solver, snaps,
                                       /*stop_at_ceiling=*/true);
        row.solver_ok = sim.status == SimStatus::completed;
        row.blew_up = sim.ceiling_hit || sim.status == SimStatus::dt_collapse;
        auto window_sup = [&](const Field& f) {
            double m = 0.0;
            for (int i = 0; i < f.grid.n_nodes(); ++i) {
                const double x = f.grid.node(i);
                if (x >= window_lo && x <= window_hi) m = std::max(m, std::abs(f.values[i]));
            }
            return m;
        };
        row.window_sup = window_sup(v0);
        for (const Field& s : sim.trajectory.snapshots)
            row.window_sup = std::max(row.window_sup, window_sup(s));
        if (!sim.final_state.values.empty())
            row.window_sup = std::max(row.window_sup, window_sup(sim.final_state));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace tfelab
