#pragma once

#include <vector>

namespace tfelab {

// General banded matrix with kl sub- and ku super-diagonals, LAPACK-style
// band storage with kl extra rows for the partial-pivoting fill-in.
class BandedMatrix {
public:
    BandedMatrix(int n, int kl, int ku);

    void zero();
    int size() const { return n_; }
    int lower() const { return kl_; }
    int upper() const { return ku_; }

    // valid for |i - j| within the band; no bounds checking beyond asserts
    double& at(int i, int j);
    double at(int i, int j) const;
    bool in_band(int i, int j) const;

    // LU factorization with partial pivoting. Returns false on exact
    // singularity. solve() overwrites rhs with the solution.
    bool factor();
    void solve(std::vector<double>& rhs) const;

private:
    int n_, kl_, ku_;
    bool factored_ = false;
    std::vector<double> a_;       // (2*kl + ku + 1) x n, column-major bands
    std::vector<int> ipiv_;
    int rows_() const { return 2 * kl_ + ku_ + 1; }
    double& store_(int r, int j) { return a_[static_cast<size_t>(j) * rows_() + r]; }
    const double& store_(int r, int j) const { return a_[static_cast<size_t>(j) * rows_() + r]; }
};

// Solves A x = rhs where A is banded in the cyclic sense: entries at
// (i, (i+d) mod n) for |d| <= band. Entries that wrap around the corners are
// handled by a low-rank Woodbury correction on top of the banded LU.
//
// row_entries[i] holds the 2*band+1 coefficients for offsets -band..band.
// Returns false if the factorization breaks down.
bool solve_cyclic_banded(int n, int band,
                         const std::vector<std::vector<double>>& row_entries,
                         std::vector<double>& rhs);

}  // namespace tfelab
