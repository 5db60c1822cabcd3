#include "tfelab/banded.hpp"

#include <cassert>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace tfelab {

BandedMatrix::BandedMatrix(int n, int kl, int ku) : n_(n), kl_(kl), ku_(ku) {
    if (n <= 0 || kl < 0 || ku < 0) throw std::invalid_argument("BandedMatrix: bad shape");
    a_.assign(static_cast<size_t>(rows_()) * n_, 0.0);
    ipiv_.assign(n_, 0);
}

void BandedMatrix::zero() {
    std::fill(a_.begin(), a_.end(), 0.0);
    factored_ = false;
}

bool BandedMatrix::in_band(int i, int j) const {
    return i >= 0 && j >= 0 && i < n_ && j < n_ && j - i <= ku_ && i - j <= kl_;
}

double& BandedMatrix::at(int i, int j) {
    assert(in_band(i, j));
    return store_(kl_ + ku_ + i - j, j);
}

double BandedMatrix::at(int i, int j) const {
    assert(in_band(i, j));
    return store_(kl_ + ku_ + i - j, j);
}

// Band LU with partial pivoting (the dgbtrf algorithm on compact storage).
bool BandedMatrix::factor() {
    const int kv = kl_ + ku_;  // rows above the diagonal in storage after fill-in
    for (int j = 0; j < n_; ++j) {
        // pivot search in column j, rows j..min(j+kl, n-1)
        const int extent = std::min(kl_, n_ - 1 - j);
        int piv = 0;
        double pmax = std::abs(store_(kv, j));
        for (int k = 1; k <= extent; ++k) {
            const double v = std::abs(store_(kv + k, j));
            if (v > pmax) { pmax = v; piv = k; }
        }
        ipiv_[j] = j + piv;
        if (pmax == 0.0) return false;
        const int jmax = std::min(n_ - 1, j + kv);  // last column touched by row ops
        if (piv != 0) {
            for (int c = j; c <= jmax; ++c) {
                const int r0 = kv + j - c, r1 = kv + j + piv - c;
                std::swap(store_(r0, c), store_(r1, c));
            }
        }
        const double d = store_(kv, j);
        for (int k = 1; k <= extent; ++k) {
            const double m = store_(kv + k, j) / d;
            store_(kv + k, j) = m;
            for (int c = j + 1; c <= jmax; ++c)
                store_(kv + k + j - c, c) -= m * store_(kv + j - c, c);
        }
    }
    factored_ = true;
    return true;
}

void BandedMatrix::solve(std::vector<double>& rhs) const {
    if (!factored_) throw std::runtime_error("BandedMatrix::solve before factor");
    const int kv = kl_ + ku_;
    // forward substitution with the recorded row swaps
    for (int j = 0; j < n_; ++j) {
        if (ipiv_[j] != j) std::swap(rhs[j], rhs[ipiv_[j]]);
        const int extent = std::min(kl_, n_ - 1 - j);
        for (int k = 1; k <= extent; ++k)
            rhs[j + k] -= store_(kv + k, j) * rhs[j];
    }
    // back substitution
    for (int j = n_ - 1; j >= 0; --j) {
        const int top = std::max(0, j - kv);
        rhs[j] /= store_(kv, j);
        for (int i = top; i < j; ++i)
            rhs[i] -= store_(kv + i - j, j) * rhs[j];
    }
}

namespace {

// dense LU with partial pivoting for the small Woodbury capacitance system
bool dense_solve(std::vector<std::vector<double>>& A, std::vector<double>& b) {
    const int m = static_cast<int>(b.size());
    for (int c = 0; c < m; ++c) {
        int piv = c;
        for (int r = c + 1; r < m; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        if (A[piv][c] == 0.0) return false;
        std::swap(A[c], A[piv]);
        std::swap(b[c], b[piv]);
        for (int r = c + 1; r < m; ++r) {
            const double f = A[r][c] / A[c][c];
            for (int k = c; k < m; ++k) A[r][k] -= f * A[c][k];
            b[r] -= f * b[c];
        }
    }
    for (int c = m - 1; c >= 0; --c) {
        for (int k = c + 1; k < m; ++k) b[c] -= A[c][k] * b[k];
        b[c] /= A[c][c];
    }
    return true;
}

}  // namespace

bool solve_cyclic_banded(int n, int band,
                         const std::vector<std::vector<double>>& row_entries,
                         std::vector<double>& rhs) {
    if (n <= 2 * band + 1) {
        // too small for the band/corner split; dense fallback
        std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
        for (int i = 0; i < n; ++i)
            for (int d = -band; d <= band; ++d)
                A[i][((i + d) % n + n) % n] += row_entries[i][d + band];
        return dense_solve(A, rhs);
    }

    BandedMatrix B(n, band, band);
    struct Corr { int row; std::vector<std::pair<int, double>> cols; };
    std::vector<Corr> corr;
    for (int i = 0; i < n; ++i) {
        Corr c{i, {}};
        for (int d = -band; d <= band; ++d) {
            const double v = row_entries[i][d + band];
            if (v == 0.0) continue;
            const int j = i + d;
            if (j >= 0 && j < n) {
                B.at(i, j) += v;
            } else {
                c.cols.emplace_back(((j % n) + n) % n, v);  // wrapped entry
            }
        }
        if (!c.cols.empty()) corr.push_back(std::move(c));
    }
    if (!B.factor()) return false;

    // A = B + sum_k e_{r_k} w_k^T;  Woodbury with the k x k capacitance matrix
    const int m = static_cast<int>(corr.size());
    std::vector<double> x = rhs;
    B.solve(x);
    if (m == 0) { rhs = x; return true; }

    std::vector<std::vector<double>> Y(m, std::vector<double>(n, 0.0));
    for (int k = 0; k < m; ++k) {
        Y[k][corr[k].row] = 1.0;
        B.solve(Y[k]);
    }
    std::vector<std::vector<double>> M(m, std::vector<double>(m, 0.0));
    std::vector<double> c(m, 0.0);
    for (int k = 0; k < m; ++k) {
        for (int l = 0; l < m; ++l) {
            double dot = 0.0;
            for (const auto& [j, v] : corr[k].cols) dot += v * Y[l][j];
            M[k][l] = (k == l ? 1.0 : 0.0) + dot;
        }
        double dot = 0.0;
        for (const auto& [j, v] : corr[k].cols) dot += v * x[j];
        c[k] = dot;
    }
    if (!dense_solve(M, c)) return false;
    for (int i = 0; i < n; ++i) {
        double acc = x[i];
        for (int k = 0; k < m; ++k) acc -= c[k] * Y[k][i];
        rhs[i] = acc;
    }
    return true;
}

}  // namespace tfelab
