#include "tfelab/regularization.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tfelab {

double mobility(double u, const ModelParams& params) {
    if (!std::isfinite(u)) throw std::invalid_argument("mobility: non-finite u");
    params.validate();
    const double n = params.n, eps = params.epsilon;
    switch (params.mobility) {
        case MobilityFamily::unit:
            return 1.0;
        case MobilityFamily::degenerate:
            return std::pow(u * u, 0.5 * n);
        case MobilityFamily::simple:
            return std::pow(eps * eps + u * u, 0.5 * n);
        case MobilityFamily::homotopy:
            return std::pow(eps, n) + (1.0 - eps) * std::pow(eps * eps + u * u, 0.5 * n);
    }
    return 0.0;
}

double mobility_derivative(double u, const ModelParams& params) {
    if (!std::isfinite(u)) throw std::invalid_argument("mobility_derivative: non-finite u");
    const double n = params.n, eps = params.epsilon;
    switch (params.mobility) {
        case MobilityFamily::unit:
            return 0.0;
        case MobilityFamily::degenerate: {
            if (u == 0.0) return 0.0;  // limit for n > 1; rows at zeros handled by dt control
            return n * u * std::pow(u * u, 0.5 * n - 1.0);
        }
        case MobilityFamily::simple:
            return n * u * std::pow(eps * eps + u * u, 0.5 * n - 1.0);
        case MobilityFamily::homotopy:
            return (1.0 - eps) * n * u * std::pow(eps * eps + u * u, 0.5 * n - 1.0);
    }
    return 0.0;
}

double perturbation_F(double u, double eps, double n) {
    if (!std::isfinite(u) || !std::isfinite(eps) || !std::isfinite(n))
        throw std::invalid_argument("perturbation_F: non-finite input");
    if (!(n > 0.0)) throw std::invalid_argument("perturbation_F: n must be positive");
    if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("perturbation_F: eps outside [0,1]");
    return 1.0 - std::pow(eps * eps + u * u, 0.5 * n);
}

namespace {

LogExpansionRow expansion_row(double u, double eps, double n) {
    LogExpansionRow row;
    row.n = n;
    row.eps = eps;
    row.F = perturbation_F(u, eps, n);
    const double lg = std::log(eps * eps + u * u);
    row.leading = -0.5 * n * lg;
    if (lg == 0.0) {
        row.exact_match = true;
        row.ratio = 1.0;  // both sides vanish identically
    } else {
        row.ratio = row.F / row.leading;
    }
    return row;
}

}  // namespace

std::vector<LogExpansionRow> log_expansion_check(double u, double eps,
                                                 const std::vector<double>& n_sequence) {
    std::vector<LogExpansionRow> out;
    double prev = std::numeric_limits<double>::infinity();
    for (double n : n_sequence) {
        if (!(n > 0.0) || n >= prev)
            throw std::invalid_argument("log_expansion_check: n sequence must be positive decreasing");
        prev = n;
        out.push_back(expansion_row(u, eps, n));
    }
    return out;
}

std::vector<LogExpansionRow> log_expansion_check(double u, const Schedule& schedule,
                                                 const std::vector<double>& n_sequence) {
    std::vector<LogExpansionRow> out;
    double prev = std::numeric_limits<double>::infinity();
    for (double n : n_sequence) {
        if (!(n > 0.0) || n >= prev)
            throw std::invalid_argument("log_expansion_check: n sequence must be positive decreasing");
        prev = n;
        out.push_back(expansion_row(u, schedule.epsilon_of(n), n));
    }
    return out;
}

Schedule::Schedule(Rule rule, std::string description, double p,
                   std::vector<std::pair<double, double>> table)
    : rule_(rule), description_(std::move(description)), p_(p), table_(std::move(table)) {
    verify_decay_();
}

Schedule Schedule::exp_inv_sqrt() {
    return Schedule(Rule::exp_inv_sqrt, "exp_inv_sqrt", 0.0, {});
}

Schedule Schedule::power(double p) {
    if (!(p > 0.0)) throw std::invalid_argument("Schedule::power: p must be positive");
    std::ostringstream d;
    d << "power:" << p;
    return Schedule(Rule::power, d.str(), p, {});
}

Schedule Schedule::custom_table(std::vector<std::pair<double, double>> n_eps_pairs) {
    if (n_eps_pairs.size() < 2)
        throw std::invalid_argument("Schedule::custom_table: need at least 2 rows");
    std::sort(n_eps_pairs.begin(), n_eps_pairs.end());
    for (const auto& [n, e] : n_eps_pairs)
        if (!(n > 0.0) || !(e > 0.0) || e > 1.0)
            throw std::invalid_argument("Schedule::custom_table: entries must have n > 0, eps in (0,1]");
    return Schedule(Rule::custom_table, "custom_table", 0.0, std::move(n_eps_pairs));
}

Schedule Schedule::from_string(const std::string& key) {
    if (key == "exp_inv_sqrt") return exp_inv_sqrt();
    if (key.rfind("power:", 0) == 0) return power(std::stod(key.substr(6)));
    if (key.rfind("table:", 0) == 0) {
        std::ifstream is(key.substr(6));
        if (!is) throw std::invalid_argument("Schedule table file not found: " + key.substr(6));
        std::vector<std::pair<double, double>> rows;
        std::string line;
        while (std::getline(is, line)) {
            if (line.empty() || line[0] == '#' || line[0] == 'n') continue;
            const auto comma = line.find(',');
            rows.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
        }
        return custom_table(std::move(rows));
    }
    throw std::invalid_argument("unknown schedule key: " + key);
}

double Schedule::epsilon_of(double n) const {
    if (!(n > 0.0) || n > 1.0) throw std::invalid_argument("Schedule: n must lie in (0, 1]");
    switch (rule_) {
        case Rule::exp_inv_sqrt:
            return std::exp(-1.0 / std::sqrt(n));
        case Rule::power:
            return std::min(1.0, std::pow(n, p_));
        case Rule::custom_table: {
            // log-log linear interpolation, clamped to the table range
            if (n <= table_.front().first) return table_.front().second;
            if (n >= table_.back().first) return table_.back().second;
            size_t k = 1;
            while (table_[k].first < n) ++k;
            const auto& [n0, e0] = table_[k - 1];
            const auto& [n1, e1] = table_[k];
            const double w = (std::log(n) - std::log(n0)) / (std::log(n1) - std::log(n0));
            return std::exp((1.0 - w) * std::log(e0) + w * std::log(e1));
        }
    }
    return 0.0;
}

void Schedule::verify_decay_() const {
    const double ladder[] = {1e-1, 1e-2, 1e-3, 1e-4};
    double prev = std::numeric_limits<double>::infinity();
    for (double n : ladder) {
        const double eps = epsilon_of(n);
        if (!(eps > 0.0) || eps > 1.0)
            throw std::invalid_argument("Schedule: eps(n) outside (0,1] at n=" + std::to_string(n));
        const double decay = n * std::abs(std::log(eps));
        if (!(decay < prev))
            throw std::invalid_argument("Schedule: n|ln eps(n)| fails to decrease at n=" +
                                        std::to_string(n) + " (violates the limit condition)");
        prev = decay;
    }
}

double epsilon_of_n(const Schedule& schedule, double n) { return schedule.epsilon_of(n); }

}  // namespace tfelab
