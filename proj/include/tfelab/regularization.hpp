#pragma once

#include <string>
#include <vector>

#include "tfelab/core.hpp"

namespace tfelab {

// phi_eps(u) per ModelParams::mobility. Strictly positive for eps > 0
// (simple, homotopy); |u|^n for degenerate; 1 for unit. Throws on NaN input.
double mobility(double u, const ModelParams& params);

// d phi_eps / du, used by the Newton Jacobian.
double mobility_derivative(double u, const ModelParams& params);

// F_{n,eps}(u) = 1 - (eps^2 + u^2)^{n/2}
double perturbation_F(double u, double eps, double n);

struct LogExpansionRow {
    double n = 0.0;
    double eps = 0.0;
    double F = 0.0;          // F_{n,eps}(u)
    double leading = 0.0;    // -(n/2) ln(eps^2 + u^2)
    double ratio = 1.0;      // F / leading (1 when exact_match)
    bool exact_match = false;  // eps^2 + u^2 == 1, both sides vanish
};

class Schedule;

// Ratio of the perturbation to its logarithmic leading term, per n.
// eps fixed (pass eps >= 0) or supplied per n by a schedule.
std::vector<LogExpansionRow> log_expansion_check(double u, double eps,
                                                 const std::vector<double>& n_sequence);
std::vector<LogExpansionRow> log_expansion_check(double u, const Schedule& schedule,
                                                 const std::vector<double>& n_sequence);

// eps(n) schedules subject to n |ln eps(n)| -> 0 as n -> 0+. The constructor
// verifies the decay numerically on n in {1e-1, 1e-2, 1e-3, 1e-4} (strict
// monotone decrease) and throws if violated.
class Schedule {
public:
    enum class Rule { exp_inv_sqrt, power, custom_table };

    static Schedule exp_inv_sqrt();           // eps = exp(-1/sqrt(n))
    static Schedule power(double p);          // eps = n^p, p > 0
    static Schedule custom_table(std::vector<std::pair<double, double>> n_eps_pairs);

    // config string: "exp_inv_sqrt" | "power:<p>" | "table:<path>" (csv n,eps)
    static Schedule from_string(const std::string& key);

    double epsilon_of(double n) const;        // rejects n <= 0 or n > 1
    Rule rule() const { return rule_; }
    const std::string& description() const { return description_; }

private:
    Schedule(Rule rule, std::string description, double p,
             std::vector<std::pair<double, double>> table);
    void verify_decay_() const;
    Rule rule_;
    std::string description_;
    double p_ = 0.0;
    std::vector<std::pair<double, double>> table_;  // sorted by n, log-log interpolated
};

double epsilon_of_n(const Schedule& schedule, double n);

}  // namespace tfelab
