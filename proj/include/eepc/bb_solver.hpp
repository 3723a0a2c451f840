#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "eepc/model.hpp"

namespace eepc {

/// Axis-aligned box [lower, upper] of power vectors.
struct BoxGeometry {
  std::vector<double> lower;
  std::vector<double> upper;
};

/// Unit of work of the branch-and-bound search: geometry plus its cached bound.
struct Box {
  BoxGeometry geometry;
  double bound = 0.0;
  std::vector<double> candidate;  // maximizer of the per-ratio relaxation, inside the box
  std::uint64_t serial = 0;       // creation order, breaks ties between equal bounds
};

struct Tolerance {
  enum class Mode { absolute, relative };
  Mode mode = Mode::relative;
  double epsilon = 0.01;

  static Tolerance relative(double eps) { return {Mode::relative, eps}; }
  static Tolerance absolute(double eps) { return {Mode::absolute, eps}; }

  /// True when a box with this bound may still beat the incumbent.
  bool improves(double bound, double incumbent) const {
    return mode == Mode::absolute ? bound > incumbent + epsilon
                                  : bound > (1.0 + epsilon) * incumbent;
  }
};

struct SolveLimits {
  std::uint64_t max_boxes = 10'000'000;
  double max_seconds = std::numeric_limits<double>::infinity();
  /// Invoked for every box selected for branching, in selection order.
  std::function<void(const Box&)> on_select;
  /// Invoked whenever the incumbent value changes.
  std::function<void(double)> on_incumbent;
};

struct SolveResult {
  Allocation p;
  double value = 0.0;
  std::uint64_t iterations = 0;
  std::uint64_t boxes_created = 0;
  std::size_t peak_queue = 0;
  double wall_seconds = 0.0;
  Tolerance tolerance;
  /// False when an iteration or time cap stopped the search early.
  bool certified = false;
  /// Largest bound among boxes still open at exit (the incumbent value when none are).
  double open_bound = 0.0;
};

struct BoundResult {
  double value;
  std::vector<double> candidate;
};

/// Upper bound of `metric` over the box, obtained by freezing all
/// interference at the lower corner and maximizing every ratio separately.
BoundResult bound(const BoxGeometry& box, const ProblemInstance& inst, Metric metric);

struct Split {
  BoxGeometry lower_part;  // coordinate j restricted to [r_j, v_j]
  BoxGeometry upper_part;  // coordinate j restricted to [v_j, s_j]
  std::size_t axis;
  double cut;
};

/// Adaptive bisection through the midpoint of the lower corner and the bound's
/// candidate, along the coordinate where they differ most. Falls back to
/// longest-edge midpoint bisection when the candidate equals the lower corner.
Split bisect(const BoxGeometry& box, std::span<const double> candidate);

/// Best-first branch and bound over [0, P]. The incumbent starts at p = 0 and
/// is updated from the lower corner and bound candidate of every retained
/// child. The returned value is within the tolerance of the global optimum
/// whenever `certified` is set.
SolveResult solve_global(const ProblemInstance& inst, Metric metric,
                         Tolerance tol = Tolerance::relative(0.01),
                         const SolveLimits& limits = {});

}  // namespace eepc
