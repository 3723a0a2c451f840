#include "eepc/lambert_w.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace eepc {

namespace {

constexpr double kInvE = 1.0 / std::numbers::e;
constexpr double kBranchClamp = 1e-12;

double initial_guess(double x) {
  if (x < -0.32) {
    // series about the branch point, p = sqrt(2(ex + 1))
    const double p = std::sqrt(std::max(0.0, 2.0 * (std::numbers::e * x + 1.0)));
    return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)));
  }
  if (std::abs(x) < 1e-4) {
    return x * (1.0 - x * (1.0 - 1.5 * x));
  }
  if (x < 3.0) {
    const double l = std::log1p(x);
    return l * (1.0 - std::log1p(l) / (2.0 + l));
  }
  const double l1 = std::log(x);
  const double l2 = std::log(l1);
  return l1 - l2 + l2 / l1;
}

}  // namespace

double lambert_w0(double x) {
  if (std::isnan(x)) {
    return x;
  }
  if (x < -kInvE) {
    if (x < -kInvE - kBranchClamp) {
      throw std::domain_error("lambert_w0: argument below -1/e");
    }
    return -1.0;
  }
  if (x == 0.0) {
    return 0.0;
  }
  if (std::isinf(x)) {
    return x;
  }

  double w = initial_guess(x);
  if (w <= -1.0) {
    return -1.0;
  }
  for (int iter = 0; iter < 32; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    if (denom == 0.0 || !std::isfinite(denom)) {
      break;
    }
    double next = w - f / denom;
    if (next <= -1.0) {
      next = 0.5 * (w - 1.0);
    }
    const double step = std::abs(next - w);
    w = next;
    if (step <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(w))) {
      break;
    }
  }
  return w;
}

}  // namespace eepc
