#include "eepc/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "eepc/ratio.hpp"

namespace eepc {

namespace {

void require(bool ok, const char* what) {
  if (!ok) {
    throw std::invalid_argument(std::string("ProblemInstance: ") + what);
  }
}

void check_index(const ProblemInstance& inst, std::size_t i) {
  if (i >= inst.links()) {
    throw std::out_of_range("link index " + std::to_string(i) + " out of range");
  }
}

double log2_1p(double x) { return std::log1p(x) / std::numbers::ln2; }

}  // namespace

Metric parse_metric(std::string_view name) {
  if (name == "wsee") return Metric::wsee;
  if (name == "gee") return Metric::gee;
  if (name == "wpee") return Metric::wpee;
  if (name == "wmee") return Metric::wmee;
  if (name == "wsr") return Metric::wsr;
  throw std::invalid_argument("unknown metric '" + std::string(name) + "'");
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::wsee: return "wsee";
    case Metric::gee: return "gee";
    case Metric::wpee: return "wpee";
    case Metric::wmee: return "wmee";
    case Metric::wsr: return "wsr";
  }
  return "?";
}

ProblemInstance::ProblemInstance(std::vector<double> alpha, std::vector<double> beta,
                                 std::vector<double> p_max, std::vector<double> mu,
                                 std::vector<double> p_circuit, std::vector<double> weights,
                                 double bandwidth)
    : alpha_(std::move(alpha)),
      beta_(std::move(beta)),
      p_max_(std::move(p_max)),
      mu_(std::move(mu)),
      p_circuit_(std::move(p_circuit)),
      weights_(std::move(weights)),
      bandwidth_(bandwidth) {
  const std::size_t l = alpha_.size();
  require(l >= 1, "need at least one link");
  require(beta_.size() == l * (l - 1), "beta must have L(L-1) entries");
  require(p_max_.size() == l && mu_.size() == l && p_circuit_.size() == l && weights_.size() == l,
          "per-link arrays must have length L");
  for (std::size_t i = 0; i < l; ++i) {
    require(alpha_[i] > 0.0 && std::isfinite(alpha_[i]), "alpha must be finite and > 0");
    require(p_max_[i] > 0.0 && std::isfinite(p_max_[i]), "p_max must be finite and > 0");
    require(mu_[i] >= 0.0 && std::isfinite(mu_[i]), "mu must be finite and >= 0");
    require(p_circuit_[i] > 0.0 && std::isfinite(p_circuit_[i]), "p_circuit must be > 0");
    require(weights_[i] >= 0.0 && std::isfinite(weights_[i]), "weights must be >= 0");
  }
  for (double b : beta_) {
    require(b >= 0.0 && std::isfinite(b), "beta must be finite and >= 0");
  }
  require(bandwidth_ > 0.0 && std::isfinite(bandwidth_), "bandwidth must be > 0");
}

ProblemInstance ProblemInstance::uniform(std::vector<double> alpha, std::vector<double> beta,
                                         double p_max, double mu, double p_circuit,
                                         double bandwidth) {
  const std::size_t l = alpha.size();
  return ProblemInstance(std::move(alpha), std::move(beta), std::vector<double>(l, p_max),
                         std::vector<double>(l, mu), std::vector<double>(l, p_circuit),
                         std::vector<double>(l, 1.0), bandwidth);
}

double ProblemInstance::interference(std::span<const double> p, std::size_t i) const {
  const std::size_t l = links();
  const double* row = beta_.data() + i * (l - 1);
  double acc = 1.0;
  for (std::size_t j = 0, k = 0; j < l; ++j) {
    if (j == i) continue;
    acc += row[k++] * p[j];
  }
  return acc;
}

ProblemInstance ProblemInstance::with_weights(std::vector<double> weights) const {
  return ProblemInstance(alpha_, beta_, p_max_, mu_, p_circuit_, std::move(weights), bandwidth_);
}

ProblemInstance ProblemInstance::permuted(std::span<const std::size_t> order) const {
  const std::size_t l = links();
  if (order.size() != l) {
    throw std::invalid_argument("permutation length mismatch");
  }
  std::vector<bool> seen(l, false);
  for (std::size_t k : order) {
    if (k >= l || seen[k]) throw std::invalid_argument("not a permutation");
    seen[k] = true;
  }
  auto pick = [&](const std::vector<double>& v) {
    std::vector<double> out(l);
    for (std::size_t k = 0; k < l; ++k) out[k] = v[order[k]];
    return out;
  };
  std::vector<double> beta(beta_.size());
  for (std::size_t a = 0; a < l; ++a) {
    for (std::size_t b = 0; b < l; ++b) {
      if (a != b) beta[cross_index(a, b)] = this->beta(order[a], order[b]);
    }
  }
  return ProblemInstance(pick(alpha_), std::move(beta), pick(p_max_), pick(mu_),
                         pick(p_circuit_), pick(weights_), bandwidth_);
}

bool is_feasible(std::span<const double> p, const ProblemInstance& inst, double slack) {
  if (p.size() != inst.links()) return false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= -slack) || !(p[i] <= inst.p_max(i) + slack)) return false;
  }
  return true;
}

double sinr(std::span<const double> p, const ProblemInstance& inst, std::size_t i) {
  check_index(inst, i);
  return inst.alpha(i) * p[i] / inst.interference(p, i);
}

double rate(std::span<const double> p, const ProblemInstance& inst, std::size_t i,
            bool normalized) {
  const double r = log2_1p(sinr(p, inst, i));
  return normalized ? r : inst.bandwidth() * r;
}

double ee_link(std::span<const double> p, const ProblemInstance& inst, std::size_t i,
               bool normalized) {
  return rate(p, inst, i, normalized) / (inst.mu(i) * p[i] + inst.p_circuit(i));
}

double objective(std::span<const double> p, const ProblemInstance& inst, Metric metric) {
  const std::size_t l = inst.links();
  if (p.size() != l) {
    throw std::invalid_argument("objective: allocation length mismatch");
  }
  switch (metric) {
    case Metric::wsee: {
      double acc = 0.0;
      for (std::size_t i = 0; i < l; ++i) {
        const double r = log2_1p(inst.alpha(i) * p[i] / inst.interference(p, i));
        acc += inst.weight(i) * r / (inst.mu(i) * p[i] + inst.p_circuit(i));
      }
      return acc;
    }
    case Metric::gee: {
      double num = 0.0;
      double den = 0.0;
      for (std::size_t i = 0; i < l; ++i) {
        num += log2_1p(inst.alpha(i) * p[i] / inst.interference(p, i));
        den += inst.mu(i) * p[i] + inst.p_circuit(i);
      }
      return num / den;
    }
    case Metric::wpee: {
      double acc = 1.0;
      for (std::size_t i = 0; i < l; ++i) {
        const double r = log2_1p(inst.alpha(i) * p[i] / inst.interference(p, i));
        acc *= std::pow(r / (inst.mu(i) * p[i] + inst.p_circuit(i)), inst.weight(i));
      }
      return acc;
    }
    case Metric::wmee: {
      double acc = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < l; ++i) {
        const double r = log2_1p(inst.alpha(i) * p[i] / inst.interference(p, i));
        acc = std::min(acc, inst.weight(i) * r / (inst.mu(i) * p[i] + inst.p_circuit(i)));
      }
      return acc;
    }
    case Metric::wsr: {
      double acc = 0.0;
      for (std::size_t i = 0; i < l; ++i) {
        acc += inst.weight(i) * log2_1p(inst.alpha(i) * p[i] / inst.interference(p, i));
      }
      return acc;
    }
  }
  throw std::invalid_argument("objective: unknown metric");
}

double reported_objective(std::span<const double> p, const ProblemInstance& inst, Metric metric) {
  const double value = objective(p, inst, metric);
  if (metric == Metric::wpee) {
    double total_weight = 0.0;
    for (double w : inst.weights()) total_weight += w;
    return value * std::pow(inst.bandwidth(), total_weight);
  }
  return value * inst.bandwidth();
}

double rate_derivative(std::span<const double> p, const ProblemInstance& inst, std::size_t j,
                       std::size_t k) {
  check_index(inst, j);
  check_index(inst, k);
  const double interf = inst.interference(p, j);
  const double signal = inst.alpha(j) * p[j];
  if (j == k) {
    return inst.alpha(j) / (interf + signal) / std::numbers::ln2;
  }
  return -inst.beta(j, k) * signal / (interf * (interf + signal)) / std::numbers::ln2;
}

std::vector<double> grad_wsee(std::span<const double> p, const ProblemInstance& inst) {
  const std::size_t l = inst.links();
  std::vector<double> interf(l);
  std::vector<double> signal(l);
  std::vector<double> denom(l);
  std::vector<double> rates(l);
  for (std::size_t j = 0; j < l; ++j) {
    interf[j] = inst.interference(p, j);
    signal[j] = inst.alpha(j) * p[j];
    denom[j] = inst.mu(j) * p[j] + inst.p_circuit(j);
    rates[j] = log2_1p(signal[j] / interf[j]);
  }
  std::vector<double> grad(l, 0.0);
  for (std::size_t i = 0; i < l; ++i) {
    const double own = inst.alpha(i) / (interf[i] + signal[i]) / std::numbers::ln2;
    double g = inst.weight(i) *
               (own / denom[i] - inst.mu(i) * rates[i] / (denom[i] * denom[i]));
    for (std::size_t j = 0; j < l; ++j) {
      if (j == i) continue;
      const double cross = -inst.beta(j, i) * signal[j] /
                           (interf[j] * (interf[j] + signal[j])) / std::numbers::ln2;
      g += inst.weight(j) * cross / denom[j];
    }
    grad[i] = g;
  }
  return grad;
}

ProblemInstance normalize_instance(const ProblemInstance& inst) {
  const std::size_t l = inst.links();
  std::vector<double> alpha(l);
  std::vector<double> mu(l);
  std::vector<double> beta(inst.beta_flat().size());
  for (std::size_t i = 0; i < l; ++i) {
    alpha[i] = inst.alpha(i) * inst.p_max(i);
    mu[i] = inst.mu(i) * inst.p_max(i);
    for (std::size_t j = 0; j < l; ++j) {
      if (j != i) beta[inst.cross_index(i, j)] = inst.beta(i, j) * inst.p_max(j);
    }
  }
  const auto pc = inst.p_circuit();
  const auto w = inst.weights();
  return ProblemInstance(std::move(alpha), std::move(beta), std::vector<double>(l, 1.0),
                         std::move(mu), std::vector<double>(pc.begin(), pc.end()),
                         std::vector<double>(w.begin(), w.end()), inst.bandwidth());
}

Allocation baseline(const ProblemInstance& inst, Baseline kind) {
  const std::size_t l = inst.links();
  if (kind == Baseline::max_power) {
    const auto pm = inst.p_max();
    return Allocation(pm.begin(), pm.end());
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < l; ++i) {
    if (inst.alpha(i) > inst.alpha(best)) best = i;
  }
  Allocation p(l, 0.0);
  // alone on the channel, so the link's ratio has no interference term
  p[best] = ratio_max(inst.alpha(best), inst.mu(best), inst.p_circuit(best), 0.0,
                      inst.p_max(best))
                .argmax;
  return p;
}

}  // namespace eepc
