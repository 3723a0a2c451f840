#include "eepc/ratio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "eepc/lambert_w.hpp"

namespace eepc {

double ratio_value(double gain, double mu, double p_circuit, double p) {
  return std::log1p(gain * p) / std::numbers::ln2 / (mu * p + p_circuit);
}

double ratio_stationary_point(double gain, double mu, double p_circuit) {
  if (mu == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  // Setting the derivative to zero with x = 1 + gain p gives
  // 1 + t/x = ln x, t = gain P_c / mu - 1, solved by x = t / W0(t/e).
  const double t = gain * p_circuit / mu - 1.0;
  if (std::abs(t) < 1e-9) {
    return (std::numbers::e - 1.0) / gain;
  }
  const double x = t / lambert_w0(t / std::numbers::e);
  return (x - 1.0) / gain;
}

RatioMax ratio_max(double gain, double mu, double p_circuit, double lo, double hi) {
  if (!(lo >= 0.0) || !(hi >= lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("ratio_max: need 0 <= lo <= hi < inf");
  }
  if (!(gain > 0.0)) {
    return {lo, ratio_value(0.0, mu, p_circuit, lo)};
  }
  double p = hi;
  if (mu > 0.0) {
    p = std::clamp(ratio_stationary_point(gain, mu, p_circuit), lo, hi);
  }
  return {p, ratio_value(gain, mu, p_circuit, p)};
}

}  // namespace eepc
