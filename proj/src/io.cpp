#include "tfelab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tfelab {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fnv1a_hex(const std::string& data) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open for writing: " + tmp);
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!os) throw std::runtime_error("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path.string());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

NumericCsv read_numeric_csv(const std::string& content) {
    NumericCsv out;
    std::istringstream is(content);
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        size_t pos = 0;
        while (true) {
            const auto comma = line.find(',', pos);
            cells.push_back(line.substr(pos, comma == std::string::npos ? comma : comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (first) {
            out.header = cells;
            first = false;
            continue;
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) row.push_back(std::stod(c));
        out.rows.push_back(std::move(row));
    }
    return out;
}

bool csv_numerically_equal(const std::string& a, const std::string& b, double rel_tol,
                           std::string* first_divergence) {
    NumericCsv ca, cb;
    try {
        ca = read_numeric_csv(a);
        cb = read_numeric_csv(b);
    } catch (const std::exception& e) {
        if (first_divergence) *first_divergence = std::string("parse error: ") + e.what();
        return false;
    }
    auto fail = [&](const std::string& m) {
        if (first_divergence) *first_divergence = m;
        return false;
    };
    if (ca.header != cb.header) return fail("headers differ");
    if (ca.rows.size() != cb.rows.size()) return fail("row counts differ");
    for (size_t r = 0; r < ca.rows.size(); ++r) {
        if (ca.rows[r].size() != cb.rows[r].size()) return fail("column counts differ");
        for (size_t c = 0; c < ca.rows[r].size(); ++c) {
            const double x = ca.rows[r][c], y = cb.rows[r][c];
            const double scale = std::max({1.0, std::abs(x), std::abs(y)});
            if (std::abs(x - y) > rel_tol * scale) {
                std::ostringstream m;
                m << "row " << r + 1 << " col " << c + 1 << ": " << x << " vs " << y;
                return fail(m.str());
            }
        }
    }
    return true;
}

}  // namespace tfelab
