#pragma once

namespace eepc {

struct RatioMax {
  double argmax;
  double value;
};

/// Maximizes f(p) = log2(1 + gain p) / (mu p + p_circuit) over [lo, hi].
///
/// f is strictly pseudo-concave, so the unconstrained stationary point is
/// computed in closed form through W0 and then clipped into the interval.
/// Throws std::invalid_argument unless 0 <= lo <= hi.
RatioMax ratio_max(double gain, double mu, double p_circuit, double lo, double hi);

/// Unconstrained maximizer of the ratio over p >= 0 (infinite when mu == 0).
double ratio_stationary_point(double gain, double mu, double p_circuit);

/// log2(1 + gain p) / (mu p + p_circuit)
double ratio_value(double gain, double mu, double p_circuit, double p);

}  // namespace eepc
