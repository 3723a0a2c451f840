#include "eepc/bb_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <stdexcept>

#include "eepc/ratio.hpp"

namespace eepc {

namespace {

struct BoxOrder {
  bool operator()(const Box& a, const Box& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.serial > b.serial;
  }
};

}  // namespace

BoundResult bound(const BoxGeometry& box, const ProblemInstance& inst, Metric metric) {
  const std::size_t l = inst.links();
  const auto& r = box.lower;
  const auto& s = box.upper;
  BoundResult out{0.0, std::vector<double>(l)};

  if (metric == Metric::wsr) {
    for (std::size_t i = 0; i < l; ++i) {
      const double gain = inst.alpha(i) / inst.interference(r, i);
      out.candidate[i] = s[i];
      out.value += inst.weight(i) * std::log1p(gain * s[i]) / std::numbers::ln2;
    }
    return out;
  }

  double static_total = 0.0;
  double dynamic_total = 0.0;
  if (metric == Metric::gee) {
    for (std::size_t k = 0; k < l; ++k) {
      static_total += inst.p_circuit(k);
      dynamic_total += inst.mu(k) * r[k];
    }
  }

  out.value = metric == Metric::wpee   ? 1.0
              : metric == Metric::wmee ? std::numeric_limits<double>::infinity()
                                       : 0.0;
  for (std::size_t i = 0; i < l; ++i) {
    const double gain = inst.alpha(i) / inst.interference(r, i);
    double pc = inst.p_circuit(i);
    if (metric == Metric::gee) {
      pc = static_total + dynamic_total - inst.mu(i) * r[i];
    }
    const RatioMax m = ratio_max(gain, inst.mu(i), pc, r[i], s[i]);
    out.candidate[i] = m.argmax;
    switch (metric) {
      case Metric::wsee: out.value += inst.weight(i) * m.value; break;
      case Metric::gee: out.value += m.value; break;
      case Metric::wpee: out.value *= std::pow(m.value, inst.weight(i)); break;
      case Metric::wmee: out.value = std::min(out.value, inst.weight(i) * m.value); break;
      case Metric::wsr: break;
    }
  }
  return out;
}

Split bisect(const BoxGeometry& box, std::span<const double> candidate) {
  const std::size_t l = box.lower.size();
  if (candidate.size() != l || box.upper.size() != l) {
    throw std::invalid_argument("bisect: dimension mismatch");
  }
  std::size_t axis = 0;
  double gap = -1.0;
  for (std::size_t j = 0; j < l; ++j) {
    const double g = std::abs(candidate[j] - box.lower[j]);
    if (g > gap) {
      gap = g;
      axis = j;
    }
  }
  double cut = 0.5 * (candidate[axis] + box.lower[axis]);
  if (gap == 0.0 || !(cut > box.lower[axis] && cut < box.upper[axis])) {
    double edge = -1.0;
    for (std::size_t j = 0; j < l; ++j) {
      const double e = box.upper[j] - box.lower[j];
      if (e > edge) {
        edge = e;
        axis = j;
      }
    }
    if (!(edge > 0.0)) {
      throw std::invalid_argument("bisect: box has zero width");
    }
    cut = 0.5 * (box.lower[axis] + box.upper[axis]);
  }
  Split out{box, box, axis, cut};
  out.lower_part.upper[axis] = cut;
  out.upper_part.lower[axis] = cut;
  return out;
}

SolveResult solve_global(const ProblemInstance& inst, Metric metric, Tolerance tol,
                         const SolveLimits& limits) {
  if (!(tol.epsilon > 0.0) || !std::isfinite(tol.epsilon)) {
    throw std::invalid_argument("solve_global: tolerance must be finite and positive");
  }
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const std::size_t l = inst.links();

  SolveResult res;
  res.tolerance = tol;

  std::priority_queue<Box, std::vector<Box>, BoxOrder> open;
  std::uint64_t serial = 0;

  BoxGeometry root{std::vector<double>(l, 0.0),
                   std::vector<double>(inst.p_max().begin(), inst.p_max().end())};
  res.p = root.lower;
  res.value = objective(res.p, inst, metric);
  {
    BoundResult b = bound(root, inst, metric);
    open.push(Box{std::move(root), b.value, std::move(b.candidate), serial++});
    res.boxes_created = 1;
  }
  res.certified = true;

  while (!open.empty()) {
    if (res.boxes_created >= limits.max_boxes ||
        ((res.iterations & 255u) == 0 && std::isfinite(limits.max_seconds) &&
         std::chrono::duration<double>(clock::now() - start).count() > limits.max_seconds)) {
      res.certified = false;
      break;
    }
    // best-first: once the best open bound cannot improve, none can
    if (!tol.improves(open.top().bound, res.value)) {
      break;
    }
    Box box = open.top();
    open.pop();
    ++res.iterations;
    if (limits.on_select) limits.on_select(box);

    bool degenerate = true;
    for (std::size_t j = 0; j < l; ++j) {
      if (box.geometry.upper[j] > box.geometry.lower[j]) degenerate = false;
    }
    if (degenerate) continue;

    Split split = bisect(box.geometry, box.candidate);
    for (BoxGeometry* child : {&split.lower_part, &split.upper_part}) {
      BoundResult b = bound(*child, inst, metric);
      ++res.boxes_created;
      if (!tol.improves(b.value, res.value)) continue;
      for (const std::vector<double>* point : {&child->lower, &b.candidate}) {
        const double v = objective(*point, inst, metric);
        if (v > res.value) {
          res.value = v;
          res.p = *point;
          if (limits.on_incumbent) limits.on_incumbent(v);
        }
      }
      open.push(Box{std::move(*child), b.value, std::move(b.candidate), serial++});
    }
    res.peak_queue = std::max(res.peak_queue, open.size());
  }

  res.open_bound = open.empty() ? res.value : std::max(res.value, open.top().bound);
  res.wall_seconds = std::chrono::duration<double>(clock::now() - start).count();
  return res;
}

}  // namespace eepc
