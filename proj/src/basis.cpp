#include "pfflow/basis.hpp"

#include <cmath>
#include <numbers>

#include "pfflow/errors.hpp"

namespace pfflow {

std::string to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::sinusoidal: return "sinusoidal";
    case BasisKind::hat: return "hat";
    case BasisKind::polynomial: return "polynomial";
  }
  return "?";
}

BasisKind basis_kind_from_string(const std::string& name) {
  if (name == "sinusoidal") return BasisKind::sinusoidal;
  if (name == "hat" || name == "piecewise-linear-hat") return BasisKind::hat;
  if (name == "polynomial") return BasisKind::polynomial;
  throw ConfigError("unknown basis kind: " + name);
}

BasisSet::BasisSet(BasisKind kind, int count, double halfwidth)
    : kind_(kind), count_(count), halfwidth_(halfwidth), knot_spacing_(0.0) {
  if (count <= 0) throw Error("basis count must be positive");
  if (!(halfwidth > 0.0)) throw Error("basis halfwidth must be positive");
  if (kind == BasisKind::hat) {
    if (count < 2) throw Error("hat basis needs at least 2 knots");
    knot_spacing_ = 2.0 * halfwidth / (count - 1);
  }
}

namespace {

// sinusoidal index k >= 2 maps to frequency j = k/2 and sin (even k) /
// cos (odd k), matching the enumeration {1, x, sin, cos, sin2, cos2, ...}.
inline double sinusoid_value(int k, double x, double l) {
  if (k == 0) return 1.0;
  if (k == 1) return x;
  const int j = k / 2;
  const double arg = j * std::numbers::pi * x / l;
  return (k % 2 == 0) ? std::sin(arg) : std::cos(arg);
}

inline double sinusoid_derivative(int k, double x, double l) {
  if (k == 0) return 0.0;
  if (k == 1) return 1.0;
  const int j = k / 2;
  const double w = j * std::numbers::pi / l;
  const double arg = w * x;
  return (k % 2 == 0) ? w * std::cos(arg) : -w * std::sin(arg);
}

}  // namespace

double BasisSet::value(int k, double x) const {
  switch (kind_) {
    case BasisKind::sinusoidal:
      return sinusoid_value(k, x, halfwidth_);
    case BasisKind::polynomial: {
      double v = 1.0;
      for (int i = 0; i < k; ++i) v *= x;
      return v;
    }
    case BasisKind::hat: {
      const double xk = -halfwidth_ + k * knot_spacing_;
      if (x < -halfwidth_ || x > halfwidth_) return 0.0;
      const double u = 1.0 - std::abs(x - xk) / knot_spacing_;
      return u > 0.0 ? u : 0.0;
    }
  }
  return 0.0;
}

double BasisSet::derivative(int k, double x) const {
  switch (kind_) {
    case BasisKind::sinusoidal:
      return sinusoid_derivative(k, x, halfwidth_);
    case BasisKind::polynomial: {
      if (k == 0) return 0.0;
      double v = k;
      for (int i = 0; i < k - 1; ++i) v *= x;
      return v;
    }
    case BasisKind::hat: {
      // Left-limit convention: at a knot the slope of the cell to its left.
      if (x <= -halfwidth_ || x > halfwidth_) return 0.0;
      const double xk = -halfwidth_ + k * knot_spacing_;
      if (x > xk && x <= xk + knot_spacing_) return -1.0 / knot_spacing_;
      if (x > xk - knot_spacing_ && x <= xk) return 1.0 / knot_spacing_;
      return 0.0;
    }
  }
  return 0.0;
}

void BasisSet::values(double x, std::span<double> out) const {
  switch (kind_) {
    case BasisKind::sinusoidal: {
      if (count_ > 0) out[0] = 1.0;
      if (count_ > 1) out[1] = x;
      if (count_ > 2) {
        const double base = std::numbers::pi * x / halfwidth_;
        double s = std::sin(base), c = std::cos(base);
        const double s1 = s, c1 = c;
        for (int k = 2; k < count_; k += 2) {
          out[k] = s;
          if (k + 1 < count_) out[k + 1] = c;
          // angle addition advances to the next frequency
          const double sn = s * c1 + c * s1;
          const double cn = c * c1 - s * s1;
          s = sn;
          c = cn;
        }
      }
      return;
    }
    case BasisKind::polynomial: {
      double v = 1.0;
      for (int k = 0; k < count_; ++k) {
        out[k] = v;
        v *= x;
      }
      return;
    }
    case BasisKind::hat: {
      for (int k = 0; k < count_; ++k) out[k] = 0.0;
      if (x < -halfwidth_ || x > halfwidth_) return;
      double pos = (x + halfwidth_) / knot_spacing_;
      int cell = static_cast<int>(pos);
      if (cell >= count_ - 1) cell = count_ - 2;
      const double w = pos - cell;
      out[cell] = 1.0 - w;
      out[cell + 1] = w;
      return;
    }
  }
}

Eigen::VectorXd BasisSet::values(double x) const {
  Eigen::VectorXd out(count_);
  values(x, std::span<double>(out.data(), static_cast<size_t>(count_)));
  return out;
}

double BasisSet::derivative_sum(double x, const Eigen::VectorXd& coeffs) const {
  double acc = 0.0;
  for (int k = 0; k < count_; ++k) acc += coeffs[k] * derivative(k, x);
  return acc;
}

PushforwardMap1D::PushforwardMap1D(BasisSet b, Eigen::VectorXd t)
    : basis(std::move(b)), theta(std::move(t)) {
  if (theta.size() != basis.size())
    throw Error("theta length does not match basis count");
}

double PushforwardMap1D::value(double x) const {
  double buf[64];
  if (basis.size() <= 64) {
    std::span<double> vals(buf, static_cast<size_t>(basis.size()));
    basis.values(x, vals);
    double acc = 0.0;
    for (int k = 0; k < basis.size(); ++k) acc += theta[k] * vals[k];
    return acc;
  }
  return theta.dot(basis.values(x));
}

double PushforwardMap1D::derivative(double x) const {
  return basis.derivative_sum(x, theta);
}

Eigen::VectorXd grad_theta_map(const PushforwardMap1D& map, double x) {
  return map.basis.values(x);
}

}  // namespace pfflow
