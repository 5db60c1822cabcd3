#include "tfelab/interface_ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace tfelab {

namespace {

struct EqlcCoeffs {
    double c2, c1, c0, n;
    explicit EqlcCoeffs(double n_) : n(n_) {
        const double mu = 3.0 / n_;
        c2 = 3.0 * (mu - 1.0);
        c1 = 3.0 * mu * mu - 6.0 * mu + 2.0;
        c0 = mu * (mu - 1.0) * (mu - 2.0);
    }
};

inline double singular_term(double phi, double n, double reg) {
    if (reg == 0.0 && phi == 0.0) return 0.0;  // n < 1 limit; n >= 1 guarded upstream
    return phi * std::pow(phi * phi + reg * reg, -0.5 * n);
}

inline OdeState rhs_fast(const OdeState& y, const EqlcCoeffs& c, double reg) {
    return {y[1], y[2],
            -(c.c2 * y[2] + c.c1 * y[1] + c.c0 * y[0] + singular_term(y[0], c.n, reg))};
}

// Dormand-Prince 5(4) with FSAL
struct Rk45 {
    EqlcCoeffs coeffs;
    double reg;
    double rtol, atol;
    long steps = 0;
    long max_steps;
    bool step_underflow = false;

    Rk45(double n, double reg_, double rtol_, double atol_, long max_steps_)
        : coeffs(n), reg(reg_), rtol(rtol_), atol(atol_), max_steps(max_steps_) {}

    OdeState f(const OdeState& y) const { return rhs_fast(y, coeffs, reg); }

    // One adaptive attempt from (s, y, k1 = f(y)). On acceptance updates all
    // in-place and returns true; h is adjusted either way.
    bool try_step(double& s, OdeState& y, OdeState& k1, double& h) {
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                                a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                                a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                                b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                                e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
        ++steps;
        OdeState y2, y3, y4, y5, y6, ynew;
        for (int i = 0; i < 3; ++i) y2[i] = y[i] + h * a21 * k1[i];
        const OdeState k2 = f(y2);
        for (int i = 0; i < 3; ++i) y3[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        const OdeState k3 = f(y3);
        for (int i = 0; i < 3; ++i) y4[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        const OdeState k4 = f(y4);
        for (int i = 0; i < 3; ++i)
            y5[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        const OdeState k5 = f(y5);
        for (int i = 0; i < 3; ++i)
            y6[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        const OdeState k6 = f(y6);
        for (int i = 0; i < 3; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        const OdeState k7 = f(ynew);

        double err = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                   e6 * k6[i] + e7 * k7[i]);
            const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err = std::max(err, std::abs(ei) / sc);
        }
        if (!std::isfinite(err)) err = 2.0;
        if (err <= 1.0) {
            s += h;
            y = ynew;
            k1 = k7;  // FSAL
            h *= std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 1.0, 5.0);
            return true;
        }
        h *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 0.9);
        if (h < 1e-13) step_underflow = true;
        return false;
    }
};

// cubic Hermite over one accepted step
struct HermiteStep {
    double s0, h;
    OdeState y0, y1, f0, f1;
    double comp(int i, double sigma) const {
        const double t = sigma, t2 = t * t, t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
        const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
        return h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    }
    OdeState state(double sigma) const {
        return {comp(0, sigma), comp(1, sigma), comp(2, sigma)};
    }
    // root of component 0 in (0, 1], bisection on the cubic
    double locate_zero() const {
        double lo = 0.0, hi = 1.0;
        double flo = y0[0];
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = comp(0, mid);
            if ((flo <= 0.0) == (fm <= 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    }
};

struct Crossing {
    double s;
    OdeState state;  // phi set to 0 exactly
};

}  // namespace

OdeState eqlc_rhs(const OdeState& state, double n, double zero_reg) {
    if (!(n > 0.0) || !(n < 3.0)) throw std::invalid_argument("eqlc_rhs: n must lie in (0,3)");
    if (zero_reg < 0.0) throw std::invalid_argument("eqlc_rhs: zero_reg must be >= 0");
    if (zero_reg == 0.0 && n >= 1.0 && state[0] == 0.0)
        throw std::invalid_argument("eqlc_rhs: singular term at phi = 0 for n >= 1 needs zero_reg > 0");
    return rhs_fast(state, EqlcCoeffs(n), zero_reg);
}

std::vector<double> equilibria(double n) {
    if (!(n > 0.0) || !(n < 3.0)) throw std::invalid_argument("equilibria: n must lie in (0,3)");
    const EqlcCoeffs c(n);
    if (c.c0 >= 0.0) return {};
    // c0 + r^{-n} = 0, bracketed bisection refined by Newton
    const double gamma = -c.c0;
    double r = std::pow(gamma, -1.0 / n);
    for (int it = 0; it < 60; ++it) {
        const double g = c.c0 + std::pow(r, -n);
        const double dg = -n * std::pow(r, -n - 1.0);
        const double step = g / dg;
        r -= step;
        if (std::abs(step) <= 1e-16 * r) break;
    }
    return {-r, r};
}

namespace {

double default_zero_reg(double n, double amplitude) {
    return n >= 1.0 ? 1e-8 * std::max(amplitude, 1e-12) : 0.0;
}

struct AttractorOutcome {
    bool converged = false;
    double period = 0.0;
    OdeState anchor{};
    int crossings = 0;
    long steps = 0;
    double amplitude_seen = 0.0;
    std::string note;
};

AttractorOutcome run_attractor(double n, double reg, const OrbitOptions& opts) {
    AttractorOutcome out;
    Rk45 ode(n, reg, opts.rtol, opts.atol, opts.max_steps);
    double s = 0.0;
    OdeState y{1e-3, 0.0, 0.0};
    bool have_prev = false;
    Crossing prev{};
    int agree_count = 0;
    const double escape = 1e6;

    // amplitude tracking needs the running max of |phi|
    struct Tracker {
        double amp = 0.0;
    } trk;

    OdeState k1 = ode.f(y);
    double h = 1e-4;
    while (s < opts.s_budget && ode.steps < opts.max_steps) {
        const double s_prev_step = s;
        const OdeState y_prev = y, k_prev = k1;
        if (!ode.try_step(s, y, k1, h)) {
            if (ode.step_underflow) {
                out.note = "step size underflow";
                out.steps = ode.steps;
                return out;
            }
            continue;
        }
        trk.amp = std::max(trk.amp, std::abs(y[0]));
        if (std::abs(y[0]) > escape || std::abs(y[1]) > escape || std::abs(y[2]) > escape) {
            out.note = "trajectory escaped (no periodic attractor)";
            out.steps = ode.steps;
            out.amplitude_seen = trk.amp;
            return out;
        }
        if (y_prev[0] < 0.0 && y[0] >= 0.0) {
            const HermiteStep hs{s_prev_step, s - s_prev_step, y_prev, y, k_prev, k1};
            const double sigma = hs.locate_zero();
            OdeState at = hs.state(sigma);
            if (at[1] > 0.0) {
                at[0] = 0.0;
                const Crossing cur{s_prev_step + sigma * (s - s_prev_step), at};
                if (have_prev) {
                    ++out.crossings;
                    const double T = cur.s - prev.s;
                    const double d1 = std::abs(cur.state[1] - prev.state[1]);
                    const double d2 = std::abs(cur.state[2] - prev.state[2]);
                    const double sc1 = std::max({std::abs(cur.state[1]), std::abs(prev.state[1]), 1e-300});
                    const double sc2 = std::max({std::abs(cur.state[2]), std::abs(prev.state[2]), sc1});
                    const bool agree = d1 <= opts.section_tol * sc1 &&
                                       d2 <= opts.section_tol * sc2 &&
                                       (out.period == 0.0 ||
                                        std::abs(T - out.period) <= opts.section_tol * T);
                    out.period = T;
                    if (agree) {
                        if (++agree_count >= 2) {
                            out.converged = true;
                            out.anchor = cur.state;
                            out.steps = ode.steps;
                            out.amplitude_seen = trk.amp;
                            return out;
                        }
                    } else {
                        agree_count = 0;
                    }
                }
                prev = cur;
                have_prev = true;
            }
        }
    }
    out.note = ode.steps >= opts.max_steps ? "integration budget exceeded"
                                           : "no section agreement within the s budget";
    out.steps = ode.steps;
    out.amplitude_seen = trk.amp;
    return out;
}

// integrate from the anchor over [0, period], landing exactly on each sample
bool resample_orbit(double n, double reg, const OrbitOptions& opts, const OdeState& anchor,
                    double period, OrbitResult& orbit, long& steps_used) {
    Rk45 ode(n, reg, opts.rtol, opts.atol, opts.max_steps);
    const int ns = opts.n_samples;
    orbit.samples.clear();
    orbit.samples.reserve(ns + 1);
    double s = 0.0;
    OdeState y = anchor;
    OdeState k1 = ode.f(y);
    orbit.samples.push_back({0.0, y[0], y[1], y[2]});
    double amp = std::abs(y[0]);
    double h = 1e-4;
    for (int j = 1; j <= ns; ++j) {
        const double target = period * j / ns;
        while (s < target - 1e-15 * period) {
            double h_try = std::min(h, target - s);
            ode.try_step(s, y, k1, h_try);
            h = h_try;  // controller suggestion either way
            if (ode.step_underflow || ode.steps >= ode.max_steps) return false;
            amp = std::max(amp, std::abs(y[0]));
        }
        s = target;
        orbit.samples.push_back({target, y[0], y[1], y[2]});
    }
    orbit.amplitude = amp;
    steps_used = ode.steps;
    // loop closure, relative to the per-component sample scales
    double sc[3] = {1e-300, 1e-300, 1e-300};
    for (const auto& smp : orbit.samples) {
        sc[0] = std::max(sc[0], std::abs(smp.phi));
        sc[1] = std::max(sc[1], std::abs(smp.dphi));
        sc[2] = std::max(sc[2], std::abs(smp.ddphi));
    }
    const auto& last = orbit.samples.back();
    const double closure = std::max({std::abs(last.phi - anchor[0]) / sc[0],
                                     std::abs(last.dphi - anchor[1]) / sc[1],
                                     std::abs(last.ddphi - anchor[2]) / sc[2]});
    orbit.method_meta.closure_error = closure;
    return true;
}

OrbitResult orbit_via_attractor(double n, const OrbitOptions& opts) {
    OrbitResult orbit;
    orbit.n = n;
    orbit.mu = 3.0 / n;
    orbit.method_meta.method = "forward_attractor";

    double reg = opts.zero_reg_override >= 0.0 ? opts.zero_reg_override : default_zero_reg(n, 1.0);
    AttractorOutcome att;
    for (int pass = 0; pass < 3; ++pass) {
        att = run_attractor(n, reg, opts);
        orbit.method_meta.steps += att.steps;
        if (!att.converged) {
            orbit.method_meta.note = att.note;
            orbit.method_meta.zero_reg = reg;
            orbit.method_meta.crossings = att.crossings;
            return orbit;
        }
        if (opts.zero_reg_override >= 0.0 || reg == 0.0) break;
        // rescale the regularization to the measured amplitude and re-run
        // until it settles within a factor of 2
        const double reg_next = default_zero_reg(n, att.amplitude_seen);
        if (reg_next > 0.5 * reg && reg_next < 2.0 * reg) break;
        reg = reg_next;
    }
    orbit.method_meta.zero_reg = reg;
    orbit.method_meta.crossings = att.crossings;

    long steps = 0;
    if (!resample_orbit(n, reg, opts, att.anchor, att.period, orbit, steps)) {
        orbit.method_meta.note = "resampling failed";
        return orbit;
    }
    orbit.method_meta.steps += steps;
    orbit.period = att.period;
    orbit.converged = orbit.method_meta.closure_error <= 1e-6;
    if (!orbit.converged) orbit.method_meta.note = "loop closure above tolerance";
    return orbit;
}

OrbitResult orbit_via_shooting(double n, const OrbitOptions& opts) {
    // seed from a coarse attractor run, then Newton on (phi'(0), phi''(0), T)
    OrbitOptions coarse = opts;
    coarse.section_tol = 1e-3;
    OrbitResult seed = orbit_via_attractor(n, coarse);
    OrbitResult orbit;
    orbit.n = n;
    orbit.mu = 3.0 / n;
    orbit.method_meta.method = "shooting";
    if (!seed.converged && seed.period == 0.0) {
        orbit.method_meta.note = "shooting: no seed orbit (" + seed.method_meta.note + ")";
        return orbit;
    }
    const double reg = seed.method_meta.zero_reg;
    orbit.method_meta.zero_reg = reg;

    auto flow = [&](const OdeState& y0, double T, bool& ok) -> OdeState {
        Rk45 ode(n, reg, opts.rtol, opts.atol, opts.max_steps);
        double s = 0.0;
        OdeState y = y0;
        OdeState k1 = ode.f(y);
        double h = 1e-4;
        ok = true;
        while (s < T - 1e-15 * T) {
            double h_try = std::min(h, T - s);
            ode.try_step(s, y, k1, h_try);
            h = h_try;
            if (ode.step_underflow || ode.steps >= ode.max_steps) {
                ok = false;
                return y;
            }
        }
        return y;
    };

    double a = seed.samples.empty() ? 0.07 : seed.samples.front().dphi;
    double b = seed.samples.empty() ? 0.07 : seed.samples.front().ddphi;
    double T = seed.period;
    auto G = [&](double aa, double bb, double TT, bool& ok) -> OdeState {
        const OdeState y0{0.0, aa, bb};
        const OdeState yT = flow(y0, TT, ok);
        return {yT[0] - 0.0, yT[1] - aa, yT[2] - bb};
    };
    bool ok = true;
    OdeState g = G(a, b, T, ok);
    if (!ok) {
        orbit.method_meta.note = "shooting: flow evaluation failed";
        return orbit;
    }
    double gn = std::max({std::abs(g[0]), std::abs(g[1]), std::abs(g[2])});
    const double scale = std::max({std::abs(a), std::abs(b), 1e-6});
    for (int it = 0; it < 30 && gn > 1e-11 * scale; ++it) {
        const double da = 1e-7 * scale, db = 1e-7 * scale, dT = 1e-7 * std::max(T, 1.0);
        bool o1 = true, o2 = true, o3 = true;
        const OdeState ga = G(a + da, b, T, o1), gb = G(a, b + db, T, o2), gT = G(a, b, T + dT, o3);
        if (!(o1 && o2 && o3)) break;
        double J[3][3];
        for (int i = 0; i < 3; ++i) {
            J[i][0] = (ga[i] - g[i]) / da;
            J[i][1] = (gb[i] - g[i]) / db;
            J[i][2] = (gT[i] - g[i]) / dT;
        }
        // 3x3 solve with partial pivoting
        double rhs[3] = {-g[0], -g[1], -g[2]};
        int perm[3] = {0, 1, 2};
        for (int c = 0; c < 3; ++c) {
            int piv = c;
            for (int r = c + 1; r < 3; ++r)
                if (std::abs(J[perm[r]][c]) > std::abs(J[perm[piv]][c])) piv = r;
            std::swap(perm[c], perm[piv]);
            for (int r = c + 1; r < 3; ++r) {
                const double fct = J[perm[r]][c] / J[perm[c]][c];
                for (int k = c; k < 3; ++k) J[perm[r]][k] -= fct * J[perm[c]][k];
                rhs[perm[r]] -= fct * rhs[perm[c]];
            }
        }
        double sol[3];
        for (int c = 2; c >= 0; --c) {
            double acc = rhs[perm[c]];
            for (int k = c + 1; k < 3; ++k) acc -= J[perm[c]][k] * sol[k];
            sol[c] = acc / J[perm[c]][c];
        }
        // damped update
        double lambda = 1.0;
        for (int bt = 0; bt < 6; ++bt) {
            bool okc = true;
            const OdeState gc = G(a + lambda * sol[0], b + lambda * sol[1], T + lambda * sol[2], okc);
            const double gcn = std::max({std::abs(gc[0]), std::abs(gc[1]), std::abs(gc[2])});
            if (okc && gcn < gn) {
                a += lambda * sol[0];
                b += lambda * sol[1];
                T += lambda * sol[2];
                g = gc;
                gn = gcn;
                break;
            }
            lambda *= 0.5;
            if (bt == 5) {
                orbit.method_meta.note = "shooting: line search stalled";
                it = 30;
            }
        }
    }
    if (gn > 1e-9 * scale || !(T > 0.0)) {
        if (orbit.method_meta.note.empty()) orbit.method_meta.note = "shooting: Newton did not converge";
        return orbit;
    }
    long steps = 0;
    if (!resample_orbit(n, reg, opts, {0.0, a, b}, T, orbit, steps)) {
        orbit.method_meta.note = "shooting: resampling failed";
        return orbit;
    }
    orbit.method_meta.steps = steps;
    orbit.period = T;
    orbit.converged = orbit.method_meta.closure_error <= 1e-6;
    return orbit;
}

}  // namespace

OrbitResult find_periodic_orbit(double n, OrbitMethod method, const OrbitOptions& opts) {
    if (!(n > 0.0) || !(n < 2.2))
        throw std::invalid_argument("find_periodic_orbit: n must lie in (0, 2.2)");
    return method == OrbitMethod::forward_attractor ? orbit_via_attractor(n, opts)
                                                    : orbit_via_shooting(n, opts);
}

double OrbitResult::phi(double s) const {
    if (samples.size() < 4 || period <= 0.0) return 0.0;
    const int ns = static_cast<int>(samples.size()) - 1;  // samples[ns] closes the loop
    double sw = std::fmod(s, period);
    if (sw < 0.0) sw += period;
    const double pos = sw / period * ns;
    int i1 = static_cast<int>(std::floor(pos));
    const double u = pos - i1;
    auto at = [&](int i) { return samples[((i % ns) + ns) % ns].phi; };
    const double um1 = u + 1.0, u1 = u - 1.0, u2 = u - 2.0;
    return -u * u1 * u2 / 6.0 * at(i1 - 1) + um1 * u1 * u2 / 2.0 * at(i1) -
           um1 * u * u2 / 2.0 * at(i1 + 1) + um1 * u * u1 / 6.0 * at(i1 + 2);
}

double orbit_equation_residual(const OrbitResult& orbit) {
    if (orbit.samples.size() < 16) return std::numeric_limits<double>::infinity();
    const int ns = static_cast<int>(orbit.samples.size()) - 1;
    const double ds = orbit.period / ns;
    const EqlcCoeffs c(orbit.n);
    const double reg = orbit.method_meta.zero_reg;
    auto smp = [&](int i) -> const OrbitSample& {
        return orbit.samples[((i % ns) + ns) % ns];
    };
    double worst = 0.0, scale = 1e-300;
    for (int i = 0; i < ns; ++i) {
        // skip stencils that straddle a zero of phi: the singular term has a
        // cusp there and the finite difference is not meaningful
        bool sign_ok = true;
        const double s0 = smp(i - 2).phi;
        for (int k = -1; k <= 2; ++k)
            if (smp(i + k).phi * s0 <= 0.0) sign_ok = false;
        const OdeState y{smp(i).phi, smp(i).dphi, smp(i).ddphi};
        const OdeState r = rhs_fast(y, c, reg);
        scale = std::max(scale, std::abs(r[2]));
        if (!sign_ok) continue;
        const double d3 = (-smp(i + 2).ddphi + 8.0 * smp(i + 1).ddphi - 8.0 * smp(i - 1).ddphi +
                           smp(i - 2).ddphi) / (12.0 * ds);
        worst = std::max(worst, std::abs(d3 - r[2]));
    }
    return worst / scale;
}

ScanResult heteroclinic_scan(double n_lo, double n_hi, int steps, const OrbitOptions& opts) {
    if (!(n_lo > 1.5) || !(n_hi < 2.0) || !(n_lo < n_hi))
        throw std::invalid_argument("heteroclinic_scan: range must lie inside (1.5, 2.0)");
    if (steps < 8) throw std::invalid_argument("heteroclinic_scan: need at least 8 steps");

    ScanResult out;
    for (int i = 0; i < steps; ++i) {
        const double n = n_lo + (n_hi - n_lo) * i / (steps - 1);
        const OrbitResult orbit = find_periodic_orbit(n, OrbitMethod::forward_attractor, opts);
        out.period_table.push_back({n, orbit.converged, orbit.period, orbit.amplitude});
    }
    // bracket: last converged before the first failure
    int last_ok = -1, first_fail = -1;
    for (size_t i = 0; i < out.period_table.size(); ++i) {
        if (out.period_table[i].converged) {
            if (first_fail < 0) last_ok = static_cast<int>(i);
        } else if (last_ok >= 0 && first_fail < 0) {
            first_fail = static_cast<int>(i);
        }
    }
    if (last_ok < 0) {
        out.n_h_estimate = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    out.bracket_lo = out.period_table[last_ok].n;
    out.bracket_hi = first_fail >= 0 ? out.period_table[first_fail].n : n_hi;

    std::vector<double> ns, Ts;
    for (const auto& row : out.period_table)
        if (row.converged) {
            ns.push_back(row.n);
            Ts.push_back(row.period);
        }
    if (ns.size() >= 4) {
        // period ~ a + b (-ln(n_h - n)); scan the divergence point for the
        // best linear fit
        auto sse_at = [&](double nh) {
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            const int m = static_cast<int>(ns.size());
            std::vector<double> xs(m);
            for (int i = 0; i < m; ++i) {
                xs[i] = -std::log(nh - ns[i]);
                sx += xs[i];
                sy += Ts[i];
                sxx += xs[i] * xs[i];
                sxy += xs[i] * Ts[i];
            }
            const double denom = m * sxx - sx * sx;
            if (denom == 0.0) return std::numeric_limits<double>::infinity();
            const double slope = (m * sxy - sx * sy) / denom;
            const double icpt = (sy - slope * sx) / m;
            double sse = 0.0;
            for (int i = 0; i < m; ++i) {
                const double r = Ts[i] - (slope * xs[i] + icpt);
                sse += r * r;
            }
            if (slope <= 0.0) sse += 1e6;  // the period must grow toward n_h
            return sse;
        };
        // golden-section over (bracket_lo, bracket_hi + margin)
        const double margin = 0.5 * (out.bracket_hi - out.bracket_lo);
        double lo = out.bracket_lo + 1e-6, hi = out.bracket_hi + margin;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        double f1 = sse_at(x1), f2 = sse_at(x2);
        for (int it = 0; it < 120; ++it) {
            if (f1 < f2) {
                hi = x2; x2 = x1; f2 = f1;
                x1 = hi - gr * (hi - lo);
                f1 = sse_at(x1);
            } else {
                lo = x1; x1 = x2; f1 = f2;
                x2 = lo + gr * (hi - lo);
                f2 = sse_at(x2);
            }
        }
        out.fit_value = 0.5 * (lo + hi);
        out.fit_valid = std::isfinite(out.fit_value);
    }
    out.n_h_estimate = out.fit_valid
                           ? std::clamp(out.fit_value, out.bracket_lo, out.bracket_hi)
                           : 0.5 * (out.bracket_lo + out.bracket_hi);
    return out;
}

Field sample_initial_data(const Grid1D& grid, const ModelParams& params, const OrbitResult& orbit) {
    if (!orbit.converged)
        throw std::invalid_argument("sample_initial_data: orbit did not converge");
    return sample_interface_data(grid, params.n, [&](double s) { return orbit.phi(s); });
}

}  // namespace tfelab
