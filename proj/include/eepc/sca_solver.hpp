#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "eepc/bb_solver.hpp"
#include "eepc/model.hpp"

namespace eepc {

struct ScaOptions {
  double armijo_slope = 0.1;   // sufficient-ascent fraction, in (0, 1)
  double armijo_shrink = 0.5;  // backtracking factor, in (0, 1)
  double tolerance = 1e-8;     // relative objective change that stops the iteration
  /// The objective test only stops the iteration once the projected-gradient
  /// residual is at most this times 1 + ||p||; 0 disables the extra check.
  double stationarity_tolerance = 1e-5;
  std::size_t max_iterations = 10'000;

  void validate() const;
};

struct ScaTrace {
  std::vector<double> objective;  // f(p^(0)), f(p^(1)), ...
  std::vector<double> steps;
  double stationarity = 0.0;  // ||proj(p + grad f) - p|| at the final point
  bool stalled_line_search = false;
};

/// Linear coefficient c_i of the link-i surrogate built around `expansion`.
double surrogate_slope(std::size_t i, std::span<const double> expansion,
                       const ProblemInstance& inst);

/// Concave surrogate of w_i EE_i in p_i alone, built around `expansion`.
double surrogate(double p_i, std::size_t i, std::span<const double> expansion,
                 const ProblemInstance& inst);

/// Maximizer of the link-i surrogate over [0, P_i].
double best_response(std::size_t i, std::span<const double> expansion,
                     const ProblemInstance& inst);

struct ArmijoStep {
  double step;
  bool stalled;  // backtracking hit its cap without satisfying the inequality
};

ArmijoStep armijo(std::span<const double> point, std::span<const double> target,
                  const ProblemInstance& inst, double slope, double shrink);

/// Projected-gradient residual ||clip(p + grad f(p), 0, P) - p||.
double stationarity_residual(std::span<const double> p, const ProblemInstance& inst);

struct ScaResult {
  SolveResult result;
  ScaTrace trace;
};

/// Successive pseudo-concave approximation for WSEE, started from `start`.
ScaResult solve_sca(const ProblemInstance& inst, std::span<const double> start,
                    const ScaOptions& opts = {});

enum class SweepMode { one_shot, double_init };

/// Runs SCA over an ascending P_max grid for one channel. `make_instance`
/// maps a grid value (dBW) to the instance for it, in physical units so that
/// a previous solution is the same power vector at the next grid point.
std::vector<ScaResult> sweep(std::span<const double> pmax_dbw,
                             const std::function<ProblemInstance(double)>& make_instance,
                             SweepMode mode, const ScaOptions& opts = {});

}  // namespace eepc
