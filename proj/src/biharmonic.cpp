#include "tfelab/biharmonic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "tfelab/io.hpp"

namespace tfelab {

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1]
constexpr int kGL = 16;
constexpr double kGLx[kGL] = {
    -0.98940093499164993, -0.94457502307323258, -0.86563120238783175, -0.75540440835500303,
    -0.61787624440264375, -0.45801677765722739, -0.28160355077925891, -0.09501250983763744,
    0.09501250983763744,  0.28160355077925891,  0.45801677765722739,  0.61787624440264375,
    0.75540440835500303,  0.86563120238783175,  0.94457502307323258,  0.98940093499164993};
constexpr double kGLw[kGL] = {
    0.02715245941175409, 0.06225352393864789, 0.09515851168249278, 0.12462897125553387,
    0.14959598881657673, 0.16915651939500254, 0.18260341504492359, 0.18945061045506850,
    0.18945061045506850, 0.18260341504492359, 0.16915651939500254, 0.14959598881657673,
    0.12462897125553387, 0.09515851168249278, 0.06225352393864789, 0.02715245941175409};

// e^{-xi^4} < 1e-18 beyond this point
const double kXiMax = std::pow(18.0 * std::log(10.0), 0.25);

template <typename F>
double composite_gl(F&& f, double a, double b, int panels) {
    double total = 0.0;
    const double w = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * w;
        double acc = 0.0;
        for (int k = 0; k < kGL; ++k) acc += kGLw[k] * f(mid + 0.5 * w * kGLx[k]);
        total += acc * 0.5 * w;
    }
    return total;
}

// refine panel count until two successive evaluations agree to tol
template <typename F>
double adaptive_gl(F&& f, double a, double b, int panels0, double tol, double* achieved) {
    int panels = std::max(2, panels0);
    double prev = composite_gl(f, a, b, panels);
    for (int round = 0; round < 12; ++round) {
        panels *= 2;
        const double cur = composite_gl(f, a, b, panels);
        const double diff = std::abs(cur - prev);
        if (diff <= tol) {
            if (achieved) *achieved = std::max(*achieved, diff);
            return cur;
        }
        prev = cur;
    }
    throw std::runtime_error("kernel quadrature failed to converge to the requested tolerance");
}

int base_panels(double y) {
    // resolve the oscillation cos(xi*y) on [0, xi_max]
    return std::max(4, static_cast<int>(std::ceil(std::abs(y) * kXiMax / 3.0)));
}

double kernel_point_1d(double y, double tol, double* achieved) {
    auto f = [y](double xi) { return std::exp(-xi * xi * xi * xi) * std::cos(xi * y); };
    return adaptive_gl(f, 0.0, kXiMax, base_panels(y), tol, achieved) / M_PI;
}

double kernel_point_2d(double r, double tol, double* achieved) {
    auto f = [r](double xi) {
        return std::exp(-xi * xi * xi * xi) * xi * std::cyl_bessel_j(0.0, xi * r);
    };
    return adaptive_gl(f, 0.0, kXiMax, base_panels(r), tol, achieved) / (2.0 * M_PI);
}

double kernel_point_3d(double r, double tol, double* achieved) {
    if (r == 0.0) {
        auto f = [](double xi) { return std::exp(-xi * xi * xi * xi) * xi * xi; };
        return adaptive_gl(f, 0.0, kXiMax, 4, tol, achieved) / (2.0 * M_PI * M_PI);
    }
    auto f = [r](double xi) { return std::exp(-xi * xi * xi * xi) * xi * std::sin(xi * r); };
    return adaptive_gl(f, 0.0, kXiMax, base_panels(r), tol, achieved) / (2.0 * M_PI * M_PI * r);
}

void fill_derivative(KernelTable& t) {
    const int n = t.n_nodes();
    const double h = t.y_grid.spacing();
    t.dF.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        if (i >= 2 && i + 2 < n) {
            t.dF[i] = (-t.F[i + 2] + 8.0 * t.F[i + 1] - 8.0 * t.F[i - 1] + t.F[i - 2]) / (12.0 * h);
        } else if (i + 1 < n && i >= 1) {
            t.dF[i] = (t.F[i + 1] - t.F[i - 1]) / (2.0 * h);
        } else if (i == 0) {
            t.dF[i] = (t.F[1] - t.F[0]) / h;
        } else {
            t.dF[i] = (t.F[n - 1] - t.F[n - 2]) / h;
        }
    }
}

EnvelopeFit fit_envelope(const KernelTable& t, double lo, double hi) {
    // local extrema of F with |y| in [lo, hi]
    std::vector<std::pair<double, double>> pts;  // (|y|^{4/3}, ln|F|)
    int count = 0;
    const int n = t.n_nodes();
    for (int i = 1; i + 1 < n; ++i) {
        const double d0 = t.F[i] - t.F[i - 1];
        const double d1 = t.F[i + 1] - t.F[i];
        const double ay = std::abs(t.y_grid.node(i));
        if (d0 * d1 < 0.0 && ay >= lo && ay <= hi && t.F[i] != 0.0) {
            pts.emplace_back(std::pow(ay, 4.0 / 3.0), std::log(std::abs(t.F[i])));
            ++count;
        }
    }
    EnvelopeFit fit;
    fit.n_extrema = count;
    if (count < 2) return fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (const auto& [x, yv] : pts) {
        sx += x; sy += yv; sxx += x * x; sxy += x * yv; syy += yv * yv;
    }
    const double m = static_cast<double>(count);
    const double denom = m * sxx - sx * sx;
    if (denom == 0.0) return fit;
    const double slope = (m * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / m;
    double ss_res = 0.0, ss_tot = 0.0;
    const double ybar = sy / m;
    for (const auto& [x, yv] : pts) {
        const double p = slope * x + intercept;
        ss_res += (yv - p) * (yv - p);
        ss_tot += (yv - ybar) * (yv - ybar);
    }
    fit.a = -slope;
    fit.prefactor = std::exp(intercept);
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    fit.valid = true;
    return fit;
}

double n_volume_integral(const KernelTable& t) {
    // trapezoid of F * |surface measure|
    const int n = t.n_nodes();
    const double h = t.y_grid.spacing();
    if (t.dimension == 1 && t.y_grid.symmetric_about_zero()) {
        double s = 0.5 * (t.F[0] + t.F[n - 1]);
        for (int i = 1; i + 1 < n; ++i) s += t.F[i];
        return s * h;
    }
    const double omega = t.dimension == 1 ? 2.0 : (t.dimension == 2 ? 2.0 * M_PI : 4.0 * M_PI);
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = t.y_grid.node(i);
        const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        s += w * t.F[i] * std::pow(r, t.dimension - 1);
    }
    return omega * s * h;
}

}  // namespace

double KernelTable::eval(double y) const {
    const double h = y_grid.spacing();
    const double s = (y - y_grid.x_min) / h;
    const int n = n_nodes();
    if (s < 0.0 || s > n - 1) return 0.0;
    int i1 = static_cast<int>(std::floor(s));
    i1 = std::clamp(i1, 1, n - 3);
    const double u = s - i1;
    // 4-point Lagrange through nodes i1-1 .. i1+2
    const double um1 = u + 1.0, u1 = u - 1.0, u2 = u - 2.0;
    const double c0 = -u * u1 * u2 / 6.0;
    const double c1 = um1 * u1 * u2 / 2.0;
    const double c2 = -um1 * u * u2 / 2.0;
    const double c3 = um1 * u * u1 / 6.0;
    return c0 * F[i1 - 1] + c1 * F[i1] + c2 * F[i1 + 1] + c3 * F[i1 + 2];
}

double KernelTable::eval_derivative(double y) const {
    const double h = y_grid.spacing();
    const double s = (y - y_grid.x_min) / h;
    const int n = n_nodes();
    if (s < 0.0 || s > n - 1) return 0.0;
    int i1 = static_cast<int>(std::floor(s));
    i1 = std::clamp(i1, 1, n - 3);
    const double u = s - i1;
    const double um1 = u + 1.0, u1 = u - 1.0, u2 = u - 2.0;
    const double c0 = -u * u1 * u2 / 6.0;
    const double c1 = um1 * u1 * u2 / 2.0;
    const double c2 = -um1 * u * u2 / 2.0;
    const double c3 = um1 * u * u1 / 6.0;
    return c0 * dF[i1 - 1] + c1 * dF[i1] + c2 * dF[i1 + 1] + c3 * dF[i1 + 2];
}

double KernelTable::tail_mass_estimate() const {
    if (!envelope.valid) return 1.0;
    const double Y = std::abs(y_grid.x_max);
    const double e = envelope.a * std::pow(Y, 4.0 / 3.0);
    // int_Y^inf pre * exp(-a s^{4/3}) ds ~ pre * exp(-a Y^{4/3}) * 3/(4 a Y^{1/3})
    return envelope.prefactor * std::exp(-e) * 3.0 / (4.0 * envelope.a * std::cbrt(Y));
}

int KernelTable::sign_changes(double y_abs_max) const {
    int count = 0;
    double prev = 0.0;
    bool have_prev = false;
    for (int i = 0; i < n_nodes(); ++i) {
        if (std::abs(y_grid.node(i)) > y_abs_max) continue;
        const double v = F[i];
        if (v == 0.0) continue;
        if (have_prev && prev * v < 0.0) ++count;
        prev = v;
        have_prev = true;
    }
    return count;
}

KernelTable kernel_1d(const Grid1D& y_grid, double quadrature_tol) {
    if (!(quadrature_tol > 0.0)) throw std::invalid_argument("kernel_1d: tol must be positive");
    if (!y_grid.symmetric_about_zero())
        throw std::invalid_argument("kernel_1d: grid must be symmetric about 0");
    KernelTable t;
    t.dimension = 1;
    t.y_grid = y_grid;
    t.quadrature_tol = quadrature_tol;
    const int n = y_grid.n_nodes();
    t.F.assign(n, 0.0);
    // compute y >= 0 and mirror (cosine transform is even, bit-exactly)
    const int mid = n / 2;  // n odd when the grid contains 0
    for (int i = mid; i < n; ++i)
        t.F[i] = kernel_point_1d(y_grid.node(i), quadrature_tol, &t.achieved_error);
    for (int i = 0; i < mid; ++i) t.F[i] = t.F[n - 1 - i];

    t.raw_integral = n_volume_integral(t);
    for (double& v : t.F) v /= t.raw_integral;
    t.normalization = n_volume_integral(t);
    fill_derivative(t);
    t.envelope = fit_envelope(t, 2.0, std::abs(y_grid.x_max));
    return t;
}

KernelTable kernel_radial(int N, const Grid1D& r_grid, double quadrature_tol) {
    if (N < 1 || N > 3) throw std::invalid_argument("kernel_radial: N must be 1, 2 or 3");
    if (r_grid.x_min < 0.0) throw std::invalid_argument("kernel_radial: r_grid must be nonnegative");
    if (!(quadrature_tol > 0.0)) throw std::invalid_argument("kernel_radial: tol must be positive");
    KernelTable t;
    t.dimension = N;
    t.y_grid = r_grid;
    t.quadrature_tol = quadrature_tol;
    const int n = r_grid.n_nodes();
    t.F.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double r = r_grid.node(i);
        t.F[i] = N == 1 ? kernel_point_1d(r, quadrature_tol, &t.achieved_error)
                : N == 2 ? kernel_point_2d(r, quadrature_tol, &t.achieved_error)
                         : kernel_point_3d(r, quadrature_tol, &t.achieved_error);
    }
    t.raw_integral = n_volume_integral(t);
    for (double& v : t.F) v /= t.raw_integral;
    t.normalization = n_volume_integral(t);
    fill_derivative(t);
    t.envelope = fit_envelope(t, 2.0, std::abs(r_grid.x_max));
    return t;
}

double kernel_residual(const KernelTable& table) {
    if (table.dimension != 1) throw std::invalid_argument("kernel_residual: needs a 1D table");
    const int n = table.n_nodes();
    if (n < 9) throw std::invalid_argument("kernel_residual: grid too coarse for third differences");
    const double h = table.y_grid.spacing();
    double worst = 0.0;
    for (int i = 2; i + 2 < n; ++i) {
        const double d3 = (table.F[i + 2] - 2.0 * table.F[i + 1] + 2.0 * table.F[i - 1] -
                           table.F[i - 2]) / (2.0 * h * h * h);
        const double rhs = table.y_grid.node(i) * table.F[i] / 4.0;
        worst = std::max(worst, std::abs(d3 - rhs));
    }
    return worst;
}

Field biharmonic_solve(const Field& u0, double t, const KernelTable& table, ConvolveInfo* info) {
    if (!(t > 0.0)) throw std::invalid_argument("biharmonic_solve: t must be positive");
    if (table.dimension != 1) throw std::invalid_argument("biharmonic_solve: needs a 1D kernel");
    u0.check_finite();

    ConvolveInfo local;
    const double sup = u0.sup_norm();
    if (sup > 0.0) {
        const double edge = std::max(std::abs(u0.values.front()), std::abs(u0.values.back()));
        local.data_truncation_warning = edge > 1e-12 * sup;
    }
    const double scale = std::pow(t, -0.25);
    const double span = (u0.grid.x_max - u0.grid.x_min) * scale;
    if (span > table.y_grid.x_max) {
        // kernel window narrower than the data span: part of F falls off-table
        local.missing_mass_estimate = table.tail_mass_estimate();
        if (local.missing_mass_estimate > 1e-6)
            throw std::runtime_error("biharmonic_solve: domain too small for the kernel support at this time "
                                     "(estimated off-table kernel mass " +
                                     format_g17(local.missing_mass_estimate) + ")");
    }

    const int n = u0.grid.n_nodes();
    const double h = u0.grid.spacing();
    Field out = make_field(u0.grid, u0.time + t);
    for (int i = 0; i < n; ++i) {
        const double x = u0.grid.node(i);
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            const double uj = u0.values[j];
            if (uj == 0.0) continue;
            acc += table.eval((x - u0.grid.node(j)) * scale) * uj;
        }
        out.values[i] = acc * h * scale;
    }
    if (info) *info = local;
    return out;
}

void write_kernel_csv(std::ostream& os, const KernelTable& table) {
    os << "y,F\n";
    for (int i = 0; i < table.n_nodes(); ++i)
        os << format_g17(table.y_grid.node(i)) << ',' << format_g17(table.F[i]) << '\n';
}

std::string kernel_sidecar_json(const KernelTable& table) {
    std::ostringstream os;
    os << "{\n"
       << "  \"dimension\": " << table.dimension << ",\n"
       << "  \"y_min\": " << format_g17(table.y_grid.x_min) << ",\n"
       << "  \"y_max\": " << format_g17(table.y_grid.x_max) << ",\n"
       << "  \"n_cells\": " << table.y_grid.n_cells << ",\n"
       << "  \"normalization\": " << format_g17(table.normalization) << ",\n"
       << "  \"raw_integral\": " << format_g17(table.raw_integral) << ",\n"
       << "  \"quadrature_tol\": " << format_g17(table.quadrature_tol) << ",\n"
       << "  \"achieved_error\": " << format_g17(table.achieved_error) << ",\n"
       << "  \"envelope\": {\"a\": " << format_g17(table.envelope.a)
       << ", \"prefactor\": " << format_g17(table.envelope.prefactor)
       << ", \"r_squared\": " << format_g17(table.envelope.r_squared)
       << ", \"n_extrema\": " << table.envelope.n_extrema << "}\n"
       << "}\n";
    return os.str();
}

}  // namespace tfelab
