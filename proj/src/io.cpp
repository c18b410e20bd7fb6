#include "pfflow/io.hpp"

#include <cstdio>
#include <fstream>

#include "pfflow/errors.hpp"

namespace pfflow {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + tmp.string());
    out << content;
    if (!out) throw Error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

Histogram make_histogram(const Eigen::VectorXd& samples, double lo, double hi, int bins) {
  if (bins <= 0) throw Error("make_histogram: bins must be positive");
  if (!(hi > lo)) throw Error("make_histogram: need hi > lo");
  Histogram h;
  h.bin_left.resize(bins);
  h.bin_right.resize(bins);
  h.count.assign(bins, 0);
  h.normalized_height.assign(bins, 0.0);
  const double width = (hi - lo) / bins;
  for (int b = 0; b < bins; ++b) {
    h.bin_left[b] = lo + b * width;
    h.bin_right[b] = lo + (b + 1) * width;
  }
  long kept = 0;
  for (Eigen::Index i = 0; i < samples.size(); ++i) {
    const double x = samples[i];
    if (x < lo || x > hi) continue;
    int b = static_cast<int>((x - lo) / width);
    if (b >= bins) b = bins - 1;
    ++h.count[b];
    ++kept;
  }
  if (kept > 0)
    for (int b = 0; b < bins; ++b)
      h.normalized_height[b] = static_cast<double>(h.count[b]) / (kept * width);
  return h;
}

std::string histogram_csv(const Histogram& hist) {
  std::string out = "bin_left,bin_right,count,normalized_height\n";
  for (size_t b = 0; b < hist.count.size(); ++b) {
    out += format_double(hist.bin_left[b]);
    out += ',';
    out += format_double(hist.bin_right[b]);
    out += ',';
    out += std::to_string(hist.count[b]);
    out += ',';
    out += format_double(hist.normalized_height[b]);
    out += '\n';
  }
  return out;
}

}  // namespace pfflow
