#include "tfelab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tfelab/regularization.hpp"

namespace tfelab {

namespace {

// same ghost conventions as the solver: zero-flux mirror at clamped ends
void scheme_laplacian(const std::vector<double>& w, int m, double h, bool periodic,
                      std::vector<double>& lap) {
    lap.resize(m);
    for (int i = 0; i < m; ++i) {
        const double um = i > 0 ? w[i - 1] : (periodic ? w[m - 1] : w[0]);
        const double up = i + 1 < m ? w[i + 1] : (periodic ? w[0] : w[m - 1]);
        lap[i] = (up - 2.0 * w[i] + um) / (h * h);
    }
}

struct FaceQuantities {
    int n_faces = 0;
    bool periodic = false;
    int m = 0;
    double h = 0.0;
    std::vector<double> T;      // third difference across the face
    std::vector<double> u_mid;  // mean of the two node values
};

FaceQuantities face_quantities(const Field& f, BoundaryMode boundary) {
    FaceQuantities q;
    q.periodic = boundary == BoundaryMode::periodic;
    q.m = q.periodic ? f.grid.n_cells : f.grid.n_nodes();
    q.h = f.grid.spacing();
    q.n_faces = q.periodic ? q.m : q.m - 1;
    std::vector<double> lap;
    scheme_laplacian(f.values, q.m, q.h, q.periodic, lap);
    q.T.resize(q.n_faces);
    q.u_mid.resize(q.n_faces);
    for (int fc = 0; fc < q.n_faces; ++fc) {
        const int a = fc, b = q.periodic ? (fc + 1) % q.m : fc + 1;
        q.T[fc] = (lap[b] - lap[a]) / q.h;
        q.u_mid[fc] = 0.5 * (f.values[a] + f.values[b]);
    }
    return q;
}

void require_matching(const Trajectory& traj, const ModelParams& params) {
    const ModelParams& p = traj.params;
    if (p.n != params.n || p.epsilon != params.epsilon || p.mobility != params.mobility)
        throw std::invalid_argument("diagnostics: params do not match the trajectory metadata");
}

struct LineFit {
    double slope = 0.0, intercept = 0.0, r_squared = 0.0;
    int n = 0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    LineFit out;
    out.n = static_cast<int>(x.size());
    if (out.n < 2) return out;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < out.n; ++i) {
        sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
    }
    const double denom = out.n * sxx - sx * sx;
    if (denom == 0.0) return out;
    out.slope = (out.n * sxy - sx * sy) / denom;
    out.intercept = (sy - out.slope * sx) / out.n;
    double ss_res = 0.0, ss_tot = 0.0;
    const double ybar = sy / out.n;
    for (int i = 0; i < out.n; ++i) {
        const double p = out.slope * x[i] + out.intercept;
        ss_res += (y[i] - p) * (y[i] - p);
        ss_tot += (y[i] - ybar) * (y[i] - ybar);
    }
    out.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return out;
}

}  // namespace

EnergyReport energy_report(const Field& state, const ModelParams& params,
                           BoundaryMode boundary, const EnergyReport* accumulated) {
    state.check_finite();
    params.validate();
    EnergyReport r;
    r.time = state.time;
    r.mass = discrete_mass(state, boundary == BoundaryMode::periodic);

    const FaceQuantities fq = face_quantities(state, boundary);
    double grad = 0.0, rate = 0.0, flux = 0.0;
    for (int fc = 0; fc < fq.n_faces; ++fc) {
        const int a = fc, b = fq.periodic ? (fc + 1) % fq.m : fc + 1;
        const double du = (state.values[b] - state.values[a]) / fq.h;
        grad += du * du;
        const double phi_f = 0.5 * (mobility(state.values[a], params) +
                                    mobility(state.values[b], params));
        rate += phi_f * fq.T[fc] * fq.T[fc];
        const double h_eps = phi_f * fq.T[fc];
        flux += h_eps * h_eps;
    }
    r.gradient_energy = 0.5 * grad * fq.h;
    r.dissipation_rate = rate * fq.h;
    r.flux_norm_sq = flux * fq.h;
    if (accumulated) {
        if (!(state.time >= accumulated->time))
            throw std::invalid_argument("energy_report: time must not decrease");
        r.cumulative_dissipation =
            accumulated->cumulative_dissipation +
            0.5 * (state.time - accumulated->time) * (r.dissipation_rate + accumulated->dissipation_rate);
    }
    if (!std::isfinite(r.gradient_energy) || !std::isfinite(r.cumulative_dissipation) ||
        !std::isfinite(r.flux_norm_sq))
        throw std::runtime_error("energy_report: non-finite result");
    return r;
}

std::vector<EnergyReport> energy_reports(const Trajectory& traj) {
    std::vector<EnergyReport> out;
    const EnergyReport* prev = nullptr;
    for (const Field& s : traj.snapshots) {
        out.push_back(energy_report(s, traj.params, traj.boundary, prev));
        prev = &out.back();
    }
    return out;
}

double energy_identity_residual(const Trajectory& traj, const ModelParams& params) {
    require_matching(traj, params);
    if (traj.snapshots.empty()) return 0.0;
    const auto reports = energy_reports(traj);
    const double e0 = reports.front().gradient_energy;
    double worst = 0.0;
    for (const auto& r : reports)
        worst = std::max(worst, std::abs(r.gradient_energy + r.cumulative_dissipation - e0));
    return worst;
}

// --- test functions ---------------------------------------------------------

namespace {
double bump01(double s) {  // C-infinity, support |s| < 1
    const double s2 = s * s;
    if (s2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s2));
}
double bump01_d(double s) {
    const double s2 = s * s;
    if (s2 >= 1.0) return 0.0;
    const double d = 1.0 - s2;
    return bump01(s) * (-2.0 * s / (d * d));
}
}  // namespace

TestFunction::TestFunction(Kind kind, double x0, double wx, double t0, double wt, double k)
    : kind_(kind), x0_(x0), wx_(wx), t0_(t0), wt_(wt), k_(k) {
    if (!(wx > 0.0) || !(wt > 0.0))
        throw std::invalid_argument("TestFunction: widths must be positive");
}

TestFunction TestFunction::bump_product(double x0, double wx, double t0, double wt) {
    return TestFunction(Kind::bump_product, x0, wx, t0, wt, 0.0);
}

TestFunction TestFunction::sine_packet(double x0, double wx, double t0, double wt, double k) {
    return TestFunction(Kind::sine_packet, x0, wx, t0, wt, k);
}

double TestFunction::value(double x, double t) const {
    const double sx = (x - x0_) / wx_, st = (t - t0_) / wt_;
    const double base = bump01(sx) * bump01(st);
    return kind_ == Kind::bump_product ? base : base * std::sin(k_ * (x - x0_));
}

double TestFunction::dx(double x, double t) const {
    const double sx = (x - x0_) / wx_, st = (t - t0_) / wt_;
    if (kind_ == Kind::bump_product) return bump01_d(sx) / wx_ * bump01(st);
    return (bump01_d(sx) / wx_ * std::sin(k_ * (x - x0_)) +
            bump01(sx) * k_ * std::cos(k_ * (x - x0_))) * bump01(st);
}

double TestFunction::dt(double x, double t) const {
    const double sx = (x - x0_) / wx_, st = (t - t0_) / wt_;
    const double space = kind_ == Kind::bump_product ? bump01(sx)
                                                     : bump01(sx) * std::sin(k_ * (x - x0_));
    return space * bump01_d(st) / wt_;
}

WeakFormResidual weak_form_residual(const Trajectory& traj, const ModelParams& params,
                                    const TestFunction& test, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("weak_form_residual: delta must be positive");
    require_matching(traj, params);
    if (traj.snapshots.size() < 2)
        throw std::invalid_argument("weak_form_residual: need at least two snapshots");

    const double n = params.n, eps = params.epsilon;
    auto m_of = [&](double u) -> double {  // u-dependent part of the mobility
        switch (params.mobility) {
            case MobilityFamily::unit: return 1.0;
            case MobilityFamily::degenerate: return std::pow(u * u, 0.5 * n);
            default: return std::pow(eps * eps + u * u, 0.5 * n);
        }
    };
    // homotopy splits into eps^n + (1-eps) m(u); other families have no
    // separate eps-term
    const bool homotopy = params.mobility == MobilityFamily::homotopy;
    const double c_eps = homotopy ? std::pow(eps, n) : 0.0;
    const double c_m = homotopy ? (1.0 - eps) : 1.0;

    std::vector<double> At(traj.snapshots.size()), Bt(traj.snapshots.size()),
        Ct(traj.snapshots.size()), Dt(traj.snapshots.size());
    for (size_t k = 0; k < traj.snapshots.size(); ++k) {
        const Field& s = traj.snapshots[k];
        const double h = s.grid.spacing();
        const double t = s.time;
        double A = 0.0;
        const int nn = s.grid.n_nodes();
        for (int i = 0; i < nn; ++i) {
            const double w = (i == 0 || i == nn - 1) ? 0.5 : 1.0;
            A += w * test.dt(s.grid.node(i), t) * s.values[i];
        }
        const FaceQuantities fq = face_quantities(s, traj.boundary);
        double B = 0.0, C = 0.0, D = 0.0;
        for (int fc = 0; fc < fq.n_faces; ++fc) {
            const int a = fc;
            const double xm = s.grid.node(a) + 0.5 * h;  // face midpoint (wrap face included)
            const double px = test.dx(xm, t);
            B += px * fq.T[fc];
            const int b = fq.periodic ? (fc + 1) % fq.m : fc + 1;
            const double mf = 0.5 * (m_of(s.values[a]) + m_of(s.values[b]));
            C += px * mf * fq.T[fc];
            if (std::abs(fq.u_mid[fc]) <= delta) D += px * mf * fq.T[fc];
        }
        At[k] = A * h;
        Bt[k] = B * h;
        Ct[k] = C * h;
        Dt[k] = D * h;
    }
    auto time_trap = [&](const std::vector<double>& vals) {
        double acc = 0.0;
        for (size_t k = 1; k < vals.size(); ++k)
            acc += 0.5 * (vals[k] + vals[k - 1]) *
                   (traj.snapshots[k].time - traj.snapshots[k - 1].time);
        return acc;
    };
    WeakFormResidual out;
    const double IA = time_trap(At), IB = time_trap(Bt), IC = time_trap(Ct), ID = time_trap(Dt);
    out.total = IA + c_eps * IB + c_m * IC;
    out.eps_term = std::abs(c_eps * IB);
    out.bad_set_term = std::abs(c_m * ID);
    return out;
}

OscillationProfile oscillation_profile(const Field& state, double tol) {
    state.check_finite();
    OscillationProfile out;
    out.time = state.time;
    const double sup = state.sup_norm();
    if (tol <= 0.0) tol = 1e-9 * sup;
    if (sup == 0.0 || tol <= 0.0 || sup <= tol) {
        out.empty = true;
        return out;
    }
    const int n = state.grid.n_nodes();
    const auto& u = state.values;
    auto above = [&](int i) { return std::abs(u[i]) > tol; };

    int iL = -1, iR = -1;
    for (int i = 0; i < n; ++i)
        if (above(i)) { iL = i; break; }
    for (int i = n - 1; i >= 0; --i)
        if (above(i)) { iR = i; break; }
    if (iL < 0) { out.empty = true; return out; }

    for (int i = iL; i < iR; ++i)
        if (above(i) && above(i + 1) && u[i] * u[i + 1] < 0.0) ++out.sign_changes;

    auto crossing = [&](int inside, int outside) -> double {
        // |u| = tol between the outside (|u|<=tol) and inside node
        if (outside < 0 || outside >= n) return state.grid.node(inside);
        const double a = std::abs(u[outside]), b = std::abs(u[inside]);
        const double w = b > a ? (tol - a) / (b - a) : 0.0;
        return state.grid.node(outside) + w * (state.grid.node(inside) - state.grid.node(outside));
    };
    out.interface_left = crossing(iL, iL - 1);
    out.interface_right = crossing(iR, iR + 1);

    // local extrema of |u| strictly inside the support
    std::vector<int> extrema;
    for (int i = std::max(1, iL); i <= std::min(n - 2, iR); ++i) {
        if (!above(i)) continue;
        const double a = std::abs(u[i - 1]), b = std::abs(u[i]), c = std::abs(u[i + 1]);
        if (b > a && b >= c) extrema.push_back(i);
    }
    auto side_fit = [&](bool left) -> std::optional<SideFit> {
        const double iface = left ? out.interface_left : out.interface_right;
        std::vector<std::pair<double, double>> pts;  // (distance, |u|)
        for (int i : extrema) {
            const double d = left ? state.grid.node(i) - iface : iface - state.grid.node(i);
            if (d > 1e-14) pts.emplace_back(d, std::abs(u[i]));
        }
        std::sort(pts.begin(), pts.end());
        if (pts.size() > 5) pts.resize(5);
        if (pts.size() < 3) return std::nullopt;
        std::vector<double> lx, ly;
        for (const auto& [d, v] : pts) {
            lx.push_back(std::log(d));
            ly.push_back(std::log(v));
        }
        const LineFit f = fit_line(lx, ly);
        return SideFit{f.slope, f.r_squared, f.n};
    };
    out.left_fit = side_fit(true);
    out.right_fit = side_fit(false);
    if (out.left_fit && out.right_fit)
        out.envelope_exponent = (out.left_fit->r_squared >= out.right_fit->r_squared)
                                    ? out.left_fit->exponent
                                    : out.right_fit->exponent;
    else if (out.left_fit)
        out.envelope_exponent = out.left_fit->exponent;
    else if (out.right_fit)
        out.envelope_exponent = out.right_fit->exponent;
    return out;
}

}  // namespace tfelab
