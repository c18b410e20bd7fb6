#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <vector>

namespace pfflow {

// Shortest round-trip decimal form (17 significant digits).
std::string format_double(double v);

// Write-temp-then-rename so partially written artifacts never appear.
void atomic_write(const std::filesystem::path& path, const std::string& content);

struct Histogram {
  std::vector<double> bin_left;
  std::vector<double> bin_right;
  std::vector<long> count;
  std::vector<double> normalized_height;  // heights * widths sum to 1
};

// Uniform-bin histogram of 1D samples over [lo, hi]; samples outside the
// range are dropped and heights normalize over the kept ones.
Histogram make_histogram(const Eigen::VectorXd& samples, double lo, double hi, int bins);

std::string histogram_csv(const Histogram& hist);

}  // namespace pfflow
