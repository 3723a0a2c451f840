#include "eepc/sca_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace eepc {

namespace {

constexpr int kMaxBacktracks = 60;

double link_denominator(std::span<const double> p, const ProblemInstance& inst, std::size_t i) {
  return inst.mu(i) * p[i] + inst.p_circuit(i);
}

}  // namespace

void ScaOptions::validate() const {
  if (!(armijo_slope > 0.0 && armijo_slope < 1.0) ||
      !(armijo_shrink > 0.0 && armijo_shrink < 1.0)) {
    throw std::invalid_argument("ScaOptions: Armijo constants must lie in (0, 1)");
  }
  if (!(tolerance >= 0.0) || !(stationarity_tolerance >= 0.0) || max_iterations == 0) {
    throw std::invalid_argument("ScaOptions: invalid stopping rule");
  }
}

double surrogate_slope(std::size_t i, std::span<const double> expansion,
                       const ProblemInstance& inst) {
  const double d_i = link_denominator(expansion, inst, i);
  double c = -inst.weight(i) * inst.mu(i) * rate(expansion, inst, i) / (d_i * d_i);
  for (std::size_t j = 0; j < inst.links(); ++j) {
    if (j == i) continue;
    c += inst.weight(j) * rate_derivative(expansion, inst, j, i) /
         link_denominator(expansion, inst, j);
  }
  return c;
}

double surrogate(double p_i, std::size_t i, std::span<const double> expansion,
                 const ProblemInstance& inst) {
  const double interf = inst.interference(expansion, i);
  const double r = std::log1p(inst.alpha(i) * p_i / interf) / std::numbers::ln2;
  return inst.weight(i) * r / link_denominator(expansion, inst, i) +
         (p_i - expansion[i]) * surrogate_slope(i, expansion, inst);
}

double best_response(std::size_t i, std::span<const double> expansion,
                     const ProblemInstance& inst) {
  const double c = surrogate_slope(i, expansion, inst);
  if (c >= 0.0) {
    return inst.p_max(i);
  }
  // d/dp [w/(D ln2) ln(1 + alpha p / I)] = w alpha / (D ln2 (I + alpha p)) = -c
  const double d_i = link_denominator(expansion, inst, i);
  const double interf = inst.interference(expansion, i);
  const double p = -inst.weight(i) / (d_i * std::numbers::ln2 * c) - interf / inst.alpha(i);
  return std::clamp(p, 0.0, inst.p_max(i));
}

ArmijoStep armijo(std::span<const double> point, std::span<const double> target,
                  const ProblemInstance& inst, double slope, double shrink) {
  const std::size_t l = inst.links();
  const double f0 = objective(point, inst, Metric::wsee);
  const std::vector<double> g = grad_wsee(point, inst);
  std::vector<double> dir(l);
  double directional = 0.0;
  for (std::size_t i = 0; i < l; ++i) {
    dir[i] = target[i] - point[i];
    directional += g[i] * dir[i];
  }
  std::vector<double> trial(l);
  double step = 1.0;
  for (int m = 0; m <= kMaxBacktracks; ++m) {
    for (std::size_t i = 0; i < l; ++i) trial[i] = point[i] + step * dir[i];
    if (objective(trial, inst, Metric::wsee) >= f0 + slope * step * directional) {
      return {step, false};
    }
    if (m < kMaxBacktracks) step *= shrink;
  }
  return {step, true};
}

double stationarity_residual(std::span<const double> p, const ProblemInstance& inst) {
  const std::vector<double> g = grad_wsee(p, inst);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double moved = std::clamp(p[i] + g[i], 0.0, inst.p_max(i)) - p[i];
    acc += moved * moved;
  }
  return std::sqrt(acc);
}

ScaResult solve_sca(const ProblemInstance& inst, std::span<const double> start,
                    const ScaOptions& opts) {
  opts.validate();
  const std::size_t l = inst.links();
  if (start.size() != l) {
    throw std::invalid_argument("solve_sca: start point has wrong length");
  }
  const auto t0 = std::chrono::steady_clock::now();

  ScaResult out;
  std::vector<double> p(l);
  for (std::size_t i = 0; i < l; ++i) p[i] = std::clamp(start[i], 0.0, inst.p_max(i));
  double f = objective(p, inst, Metric::wsee);
  out.trace.objective.push_back(f);

  bool converged = false;
  std::vector<double> target(l);
  std::vector<double> next(l);
  std::size_t iter = 0;
  while (iter < opts.max_iterations) {
    for (std::size_t i = 0; i < l; ++i) target[i] = best_response(i, p, inst);
    const ArmijoStep step = armijo(p, target, inst, opts.armijo_slope, opts.armijo_shrink);
    for (std::size_t i = 0; i < l; ++i) {
      next[i] = std::clamp(p[i] + step.step * (target[i] - p[i]), 0.0, inst.p_max(i));
    }
    const double f_next = objective(next, inst, Metric::wsee);
    ++iter;
    if (f_next < f) {
      // only reachable through rounding once the line search has stalled
      out.trace.stalled_line_search = true;
      converged = true;
      break;
    }
    out.trace.steps.push_back(step.step);
    out.trace.objective.push_back(f_next);
    const double change = std::abs(f_next - f);
    p.swap(next);
    f = f_next;
    if (step.stalled) out.trace.stalled_line_search = true;
    if (change <= opts.tolerance * std::max(1.0, std::abs(f))) {
      if (opts.stationarity_tolerance > 0.0) {
        double norm = 0.0;
        for (double x : p) norm += x * x;
        const double limit = opts.stationarity_tolerance * (1.0 + std::sqrt(norm));
        if (stationarity_residual(p, inst) > limit) continue;
      }
      converged = true;
      break;
    }
  }

  out.trace.stationarity = stationarity_residual(p, inst);
  out.result.p = std::move(p);
  out.result.value = f;
  out.result.iterations = iter;
  out.result.certified = converged;
  out.result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::vector<ScaResult> sweep(std::span<const double> pmax_dbw,
                             const std::function<ProblemInstance(double)>& make_instance,
                             SweepMode mode, const ScaOptions& opts) {
  if (!std::is_sorted(pmax_dbw.begin(), pmax_dbw.end())) {
    throw std::invalid_argument("sweep: P_max grid must be ascending");
  }
  std::vector<ScaResult> out;
  out.reserve(pmax_dbw.size());
  for (std::size_t k = 0; k < pmax_dbw.size(); ++k) {
    const ProblemInstance inst = make_instance(pmax_dbw[k]);
    const Allocation full = baseline(inst, Baseline::max_power);
    ScaResult best = solve_sca(inst, full, opts);
    if (mode == SweepMode::double_init && k > 0) {
      Allocation start = out.back().result.p;
      for (std::size_t i = 0; i < start.size(); ++i) start[i] = std::min(start[i], inst.p_max(i));
      ScaResult warm = solve_sca(inst, start, opts);
      if (warm.result.value > best.result.value) best = std::move(warm);
    }
    out.push_back(std::move(best));
  }
  return out;
}

}  // namespace eepc
