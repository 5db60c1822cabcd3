#include "tfelab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tfelab/banded.hpp"
#include "tfelab/regularization.hpp"

namespace tfelab {

void SolverConfig::validate() const {
    if (!(dt_min > 0.0) || !(dt_min <= dt_initial) || !(dt_initial <= dt_max))
        throw std::invalid_argument("SolverConfig: need 0 < dt_min <= dt_initial <= dt_max");
    if (!(newton_tol > 0.0)) throw std::invalid_argument("SolverConfig: newton_tol must be positive");
    if (newton_max_iter < 1) throw std::invalid_argument("SolverConfig: newton_max_iter must be >= 1");
    if (!(theta >= 0.5 && theta <= 1.0))
        throw std::invalid_argument("SolverConfig: theta must lie in [1/2, 1]");
}

const char* to_string(SimStatus s) {
    switch (s) {
        case SimStatus::completed: return "completed";
        case SimStatus::blowup_ceiling: return "blowup_ceiling";
        case SimStatus::dt_collapse: return "dt_collapse";
    }
    return "?";
}

namespace {

constexpr int kBand = 3;

struct SchemeWorkspace {
    int m = 0;                  // active unknowns
    bool periodic = false;
    bool pinned = false;
    double h = 0.0;
    std::vector<double> lap, face_T, face_phi, face_q, phi, dphi;

    int wrap(int i) const { return periodic ? ((i % m) + m) % m : i; }

    // Laplacian with zero-flux mirror values at clamped ends
    void compute_lap(const std::vector<double>& w) {
        for (int i = 0; i < m; ++i) {
            double um = i > 0 ? w[i - 1] : (periodic ? w[m - 1] : w[0]);
            double up = i + 1 < m ? w[i + 1] : (periodic ? w[0] : w[m - 1]);
            lap[i] = (up - 2.0 * w[i] + um) / (h * h);
        }
    }

    int n_faces() const { return periodic ? m : m - 1; }

    void compute_faces(const std::vector<double>& w, const ModelParams& params,
                       FaceAverage avg) {
        for (int i = 0; i < m; ++i) {
            phi[i] = mobility(w[i], params);
            dphi[i] = mobility_derivative(w[i], params);
        }
        for (int f = 0; f < n_faces(); ++f) {
            const int a = f, b = wrap(f + 1);
            face_T[f] = (lap[b] - lap[a]) / h;
            if (avg == FaceAverage::arithmetic) {
                face_phi[f] = 0.5 * (phi[a] + phi[b]);
            } else {
                face_phi[f] = std::sqrt(phi[a] * phi[b]);
            }
            face_q[f] = face_phi[f] * face_T[f];
        }
    }

    double divergence(int i) const {
        // (q_{i+1/2} - q_{i-1/2})/h with zero boundary faces when clamped
        const double qp = periodic ? face_q[i] : (i < n_faces() ? face_q[i] : 0.0);
        const double qm = periodic ? face_q[wrap(i - 1)] : (i > 0 ? face_q[i - 1] : 0.0);
        return (qp - qm) / h;
    }

    bool frozen(int i) const { return pinned && (i <= 1 || i >= m - 2); }
};

// stencil of the Laplacian row at node i: (index, coefficient/h^2)
void lap_stencil(const SchemeWorkspace& ws, int i, int idx[3], double coef[3], int& cnt) {
    const double ih2 = 1.0 / (ws.h * ws.h);
    if (ws.periodic) {
        idx[0] = ws.wrap(i - 1); coef[0] = ih2;
        idx[1] = i;              coef[1] = -2.0 * ih2;
        idx[2] = ws.wrap(i + 1); coef[2] = ih2;
        cnt = 3;
        return;
    }
    if (i == 0) {
        idx[0] = 0; coef[0] = -ih2;
        idx[1] = 1; coef[1] = ih2;
        cnt = 2;
    } else if (i == ws.m - 1) {
        idx[0] = ws.m - 2; coef[0] = ih2;
        idx[1] = ws.m - 1; coef[1] = -ih2;
        cnt = 2;
    } else {
        idx[0] = i - 1; coef[0] = ih2;
        idx[1] = i;     coef[1] = -2.0 * ih2;
        idx[2] = i + 1; coef[2] = ih2;
        cnt = 3;
    }
}

struct FaceDerivative {
    int idx[6];
    double val[6];
    int cnt = 0;
    void add(int j, double v) {
        for (int k = 0; k < cnt; ++k)
            if (idx[k] == j) { val[k] += v; return; }
        idx[cnt] = j;
        val[cnt++] = v;
    }
};

// d q_f / d w_j for face f between nodes a and b
FaceDerivative face_jacobian(const SchemeWorkspace& ws, int f, FaceAverage avg) {
    const int a = f, b = ws.wrap(f + 1);
    FaceDerivative d;
    int idx[3]; double coef[3]; int cnt;
    // phi_f * dT/dw
    lap_stencil(ws, b, idx, coef, cnt);
    for (int k = 0; k < cnt; ++k) d.add(idx[k], ws.face_phi[f] * coef[k] / ws.h);
    lap_stencil(ws, a, idx, coef, cnt);
    for (int k = 0; k < cnt; ++k) d.add(idx[k], -ws.face_phi[f] * coef[k] / ws.h);
    // dphi_f/dw * T
    if (avg == FaceAverage::arithmetic) {
        d.add(a, 0.5 * ws.dphi[a] * ws.face_T[f]);
        d.add(b, 0.5 * ws.dphi[b] * ws.face_T[f]);
    } else if (ws.face_phi[f] > 0.0) {
        d.add(a, 0.5 * ws.dphi[a] * ws.phi[b] / ws.face_phi[f] * ws.face_T[f]);
        d.add(b, 0.5 * ws.dphi[b] * ws.phi[a] / ws.face_phi[f] * ws.face_T[f]);
    }
    return d;
}

}  // namespace

StepStatus step(const Field& state, double dt, const ModelParams& params,
                const SolverConfig& config, Field& out, StepStats* stats) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    params.validate();
    config.validate();
    state.check_finite();

    SchemeWorkspace ws;
    ws.periodic = config.boundary == BoundaryMode::periodic;
    ws.pinned = config.boundary == BoundaryMode::pinned;
    ws.m = ws.periodic ? state.grid.n_cells : state.grid.n_nodes();
    ws.h = state.grid.spacing();
    if (ws.m < 6) throw std::invalid_argument("step: grid too coarse");
    ws.lap.assign(ws.m, 0.0);
    ws.face_T.assign(ws.n_faces(), 0.0);
    ws.face_phi.assign(ws.n_faces(), 0.0);
    ws.face_q.assign(ws.n_faces(), 0.0);
    ws.phi.assign(ws.m, 0.0);
    ws.dphi.assign(ws.m, 0.0);

    const std::vector<double>& u = state.values;
    std::vector<double> v(u.begin(), u.begin() + ws.m);
    std::vector<double> w(ws.m), R(ws.m);
    const double theta = config.theta;
    const double scale = std::max(1.0, state.sup_norm());
    const double tol = config.newton_tol * scale;

    auto compute_residual = [&]() -> double {
        for (int i = 0; i < ws.m; ++i) w[i] = theta * v[i] + (1.0 - theta) * u[i];
        ws.compute_lap(w);
        ws.compute_faces(w, params, config.face_average);
        double worst = 0.0;
        for (int i = 0; i < ws.m; ++i) {
            R[i] = ws.frozen(i) ? (v[i] - u[i]) : (v[i] - u[i] + dt * ws.divergence(i));
            worst = std::max(worst, std::abs(R[i]));
        }
        return worst;
    };

    double best = std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it <= config.newton_max_iter; ++it) {
        const double res = compute_residual();
        if (stats) { stats->iterations = it; stats->residual = res; }
        if (!std::isfinite(res)) return StepStatus::newton_diverged;
        if (res < tol) {
            // final explicit flux-form update at the converged state: the
            // update telescopes, so the discrete mass is conserved exactly
            out = state;
            for (int i = 0; i < ws.m; ++i)
                out.values[i] = ws.frozen(i) ? u[i] : u[i] - dt * ws.divergence(i);
            if (ws.periodic) out.values[ws.m] = out.values[0];
            out.time = state.time + dt;
            return StepStatus::ok;
        }
        if (it == config.newton_max_iter) break;
        if (res > 10.0 * best && it > 1) return StepStatus::newton_diverged;
        best = std::min(best, res);

        const double c = dt * theta / ws.h;
        if (ws.periodic) {
            std::vector<std::vector<double>> rows(ws.m, std::vector<double>(2 * kBand + 1, 0.0));
            for (int i = 0; i < ws.m; ++i) rows[i][kBand] = 1.0;
            for (int f = 0; f < ws.n_faces(); ++f) {
                const FaceDerivative d = face_jacobian(ws, f, config.face_average);
                const int rp = f, rm = ws.wrap(f + 1);
                for (int k = 0; k < d.cnt; ++k) {
                    int off = d.idx[k] - rp;
                    if (off > ws.m / 2) off -= ws.m;
                    if (off < -ws.m / 2) off += ws.m;
                    rows[rp][off + kBand] += c * d.val[k];
                    off = d.idx[k] - rm;
                    if (off > ws.m / 2) off -= ws.m;
                    if (off < -ws.m / 2) off += ws.m;
                    rows[rm][off + kBand] -= c * d.val[k];
                }
            }
            std::vector<double> rhs(ws.m);
            for (int i = 0; i < ws.m; ++i) rhs[i] = -R[i];
            if (!solve_cyclic_banded(ws.m, kBand, rows, rhs)) return StepStatus::newton_diverged;
            for (int i = 0; i < ws.m; ++i) v[i] += rhs[i];
        } else {
            BandedMatrix J(ws.m, kBand, kBand);
            for (int i = 0; i < ws.m; ++i) J.at(i, i) = 1.0;
            for (int f = 0; f < ws.n_faces(); ++f) {
                const FaceDerivative d = face_jacobian(ws, f, config.face_average);
                if (!ws.frozen(f))
                    for (int k = 0; k < d.cnt; ++k) J.at(f, d.idx[k]) += c * d.val[k];
                if (!ws.frozen(f + 1))
                    for (int k = 0; k < d.cnt; ++k) J.at(f + 1, d.idx[k]) -= c * d.val[k];
            }
            if (!J.factor()) return StepStatus::newton_diverged;
            std::vector<double> rhs(ws.m);
            for (int i = 0; i < ws.m; ++i) rhs[i] = -R[i];
            J.solve(rhs);
            for (int i = 0; i < ws.m; ++i) v[i] += rhs[i];
        }
    }
    return StepStatus::newton_diverged;
}

SimResult simulate(const Field& u0, const ModelParams& params, double t_final,
                   const SolverConfig& config, const std::vector<double>& snap_times,
                   bool stop_at_ceiling) {
    if (!(t_final > 0.0)) throw std::invalid_argument("simulate: t_final must be positive");
    params.validate();
    config.validate();
    u0.check_finite();

    std::vector<double> snaps = snap_times;
    std::sort(snaps.begin(), snaps.end());
    for (double s : snaps)
        if (!(s >= 0.0) || s > t_final * (1.0 + 1e-12))
            throw std::invalid_argument("simulate: snapshot times must lie in [0, t_final]");

    SimResult res;
    res.trajectory.params = params;
    res.trajectory.boundary = config.boundary;
    res.trajectory.theta = config.theta;

    Field u = u0;
    u.time = 0.0;
    size_t snap_idx = 0;
    while (snap_idx < snaps.size() && snaps[snap_idx] <= 0.0) {
        res.trajectory.snapshots.push_back(u);
        ++snap_idx;
    }

    const double sup0 = u0.sup_norm();
    const double ceiling = config.blowup_ceiling_factor * std::max(sup0, 1e-300);
    res.sup_history.emplace_back(0.0, sup0);

    double t = 0.0;
    double dt_nominal = config.dt_initial;
    Field next = u;
    StepStats stats;
    const double t_eps = 1e-12 * std::max(1.0, t_final);

    while (t < t_final - t_eps) {
        double dt = std::min(dt_nominal, t_final - t);
        bool lands_on_snap = false;
        double snap_target = 0.0;
        if (snap_idx < snaps.size() && snaps[snap_idx] - t <= dt + t_eps) {
            dt = snaps[snap_idx] - t;
            snap_target = snaps[snap_idx];
            lands_on_snap = true;
            if (dt <= 0.0) {  // duplicate snapshot time
                ++snap_idx;
                continue;
            }
        }
        const StepStatus st = step(u, dt, params, config, next, &stats);
        if (st == StepStatus::ok) {
            u = std::move(next);
            next = u;
            t = lands_on_snap ? snap_target : t + dt;
            u.time = t;
            res.trajectory.step_log.push_back({t, dt, stats.iterations, stats.residual});
            const double sup = u.sup_norm();
            res.sup_history.emplace_back(t, sup);
            if (lands_on_snap) {
                res.trajectory.snapshots.push_back(u);
                ++snap_idx;
            }
            if (sup > ceiling) {
                if (!res.ceiling_hit) {
                    res.ceiling_hit = true;
                    res.ceiling_time = t;
                }
                if (stop_at_ceiling) {
                    res.status = SimStatus::blowup_ceiling;
                    res.t_end = t;
                    res.final_state = u;
                    res.message = "sup|u| exceeded the blow-up ceiling";
                    return res;
                }
            }
            if (stats.iterations <= config.newton_grow_threshold)
                dt_nominal = std::min(dt_nominal * config.dt_growth, config.dt_max);
        } else {
            dt_nominal = 0.5 * dt;
            if (dt_nominal < config.dt_min) {
                res.status = SimStatus::dt_collapse;
                res.t_end = t;
                res.final_state = u;
                res.message = "dt fell below dt_min with Newton failing (blow-up/stiffness)";
                return res;
            }
        }
    }
    res.status = res.ceiling_hit && stop_at_ceiling ? SimStatus::blowup_ceiling : SimStatus::completed;
    res.t_end = t;
    res.final_state = u;
    return res;
}

}  // namespace tfelab
