#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace tfelab {

// %.17g: round-trips doubles exactly
std::string format_g17(double v);

// FNV-1a 64-bit, hex string; content digests for run manifests
std::string fnv1a_hex(const std::string& data);

// write to <path>.tmp then rename
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

struct NumericCsv {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

NumericCsv read_numeric_csv(const std::string& content);

// true when every numeric cell agrees to rel_tol (and layout matches)
bool csv_numerically_equal(const std::string& a, const std::string& b, double rel_tol,
                           std::string* first_divergence = nullptr);

}  // namespace tfelab
