#include "eepc/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace eepc {

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (batch < 1) throw std::invalid_argument("batch size must be >= 1");
  if (!(nadam.learning_rate >= 0.0) || !std::isfinite(nadam.learning_rate)) {
    throw std::invalid_argument("learning rate must be finite and >= 0");
  }
  if (!(nadam.beta1 >= 0.0 && nadam.beta1 < 1.0) || !(nadam.beta2 >= 0.0 && nadam.beta2 < 1.0)) {
    throw std::invalid_argument("moment decay rates must lie in [0, 1)");
  }
  if (!(nadam.epsilon > 0.0)) throw std::invalid_argument("optimizer epsilon must be > 0");
  if (!(clip > 0.0)) throw std::invalid_argument("clip must be > 0");
}

DatasetSample augment_permute(const DatasetSample& sample, std::span<const std::size_t> sigma) {
  const std::size_t l = sample.links;
  if (sigma.size() != l || sample.features.size() != l * (l + 1) || sample.label.size() != l) {
    throw std::invalid_argument("augment_permute: dimension mismatch");
  }
  std::vector<bool> seen(l, false);
  for (std::size_t s : sigma) {
    if (s >= l || seen[s]) throw std::invalid_argument("augment_permute: not a permutation");
    seen[s] = true;
  }
  auto cross = [l](std::size_t i, std::size_t j) { return l + i * (l - 1) + (j < i ? j : j - 1); };

  DatasetSample out = sample;
  for (std::size_t i = 0; i < l; ++i) {
    out.features[i] = sample.features[sigma[i]];
    out.features[l * l + i] = sample.features[l * l + sigma[i]];
    out.label[i] = sample.label[sigma[i]];
    for (std::size_t j = 0; j < l; ++j) {
      if (j != i) out.features[cross(i, j)] = sample.features[cross(sigma[i], sigma[j])];
    }
  }
  return out;
}

TrainResult train(Mlp mlp, std::span<const DatasetSample> train_set,
                  std::span<const DatasetSample> val_set, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  cfg.validate();
  if (train_set.empty()) throw std::invalid_argument("train: empty training set");
  const std::size_t n_in = mlp.inputs();
  const std::size_t n_out = mlp.outputs();
  auto check = [&](const DatasetSample& s) {
    if (s.features.size() != n_in || s.label.size() != n_out) {
      throw std::invalid_argument("train: sample dimensions do not match the network");
    }
  };
  for (const auto& s : train_set) check(s);
  for (const auto& s : val_set) check(s);

  std::vector<double> val_x;
  std::vector<double> val_y;
  for (const auto& s : val_set) {
    val_x.insert(val_x.end(), s.features.begin(), s.features.end());
    val_y.insert(val_y.end(), s.label.begin(), s.label.end());
  }

  std::mt19937_64 rng(cfg.seed);
  NadamState state = NadamState::zeros_like(mlp);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::size_t> sigma(n_out);
  std::vector<double> x;
  std::vector<double> y;

  TrainResult result;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle) std::shuffle(order.begin(), order.end(), rng);
    double weighted_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
      const std::size_t count = std::min(cfg.batch, order.size() - start);
      if (cfg.augment) {
        std::iota(sigma.begin(), sigma.end(), std::size_t{0});
        std::shuffle(sigma.begin(), sigma.end(), rng);
      }
      x.clear();
      y.clear();
      for (std::size_t k = 0; k < count; ++k) {
        const DatasetSample& s = train_set[order[start + k]];
        if (cfg.augment) {
          const DatasetSample p = augment_permute(s, sigma);
          x.insert(x.end(), p.features.begin(), p.features.end());
          y.insert(y.end(), p.label.begin(), p.label.end());
        } else {
          x.insert(x.end(), s.features.begin(), s.features.end());
          y.insert(y.end(), s.label.begin(), s.label.end());
        }
      }
      const LossAndGrad lg = loss_and_grad(mlp, x, y, count);
      weighted_loss += lg.loss * static_cast<double>(count);
      optimizer_step(mlp, state, lg.grad, cfg.nadam);
    }
    const double train_mse = weighted_loss / static_cast<double>(order.size());
    const double val_mse = val_set.empty() ? std::numeric_limits<double>::quiet_NaN()
                                           : mse(mlp, val_x, val_y, val_set.size());
    if (!std::isfinite(train_mse)) {
      throw std::runtime_error("train: loss became non-finite in epoch " +
                               std::to_string(epoch + 1));
    }
    result.history.train_mse.push_back(train_mse);
    result.history.val_mse.push_back(val_mse);
    if (on_epoch) on_epoch(epoch + 1, train_mse, val_mse);
  }
  result.model = std::move(mlp);
  return result;
}

Allocation powers_from_output(std::span<const double> output, const ProblemInstance& inst) {
  if (output.size() != inst.links()) {
    throw std::invalid_argument("network output size does not match the instance");
  }
  Allocation p(output.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double q = std::pow(10.0, output[i]);
    const double frac = std::isnan(q) ? 0.0 : std::clamp(q, 0.0, 1.0);
    p[i] = frac * inst.p_max(i);
  }
  return p;
}

Allocation predict_powers(const Mlp& mlp, const ProblemInstance& inst, double clip) {
  const std::vector<double> features = featurize(inst, clip);
  if (features.size() != mlp.inputs() || inst.links() != mlp.outputs()) {
    throw std::invalid_argument("predict_powers: instance size does not match the network");
  }
  return powers_from_output(forward(mlp, features), inst);
}

std::vector<double> default_cdf_grid() {
  std::vector<double> grid;
  for (int k = -60; k <= 0; ++k) grid.push_back(std::pow(10.0, k / 10.0));
  return grid;
}

std::vector<CdfPoint> empirical_cdf(std::span<const double> errors, std::span<const double> grid) {
  std::vector<double> sorted(errors.begin(), errors.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<CdfPoint> out;
  out.reserve(grid.size());
  for (double g : grid) {
    const auto n_le = std::upper_bound(sorted.begin(), sorted.end(), g) - sorted.begin();
    out.push_back({g, sorted.empty() ? 0.0
                                     : static_cast<double>(n_le) /
                                           static_cast<double>(sorted.size())});
  }
  return out;
}

EvalStats evaluate(const Mlp& mlp, std::span<const DatasetSample> samples, double mu,
                   double p_circuit, Metric metric) {
  const auto n = static_cast<std::ptrdiff_t>(samples.size());
  std::vector<SampleEval> rows(samples.size());
  std::vector<char> keep(samples.size(), 0);
  std::vector<std::string> failures(samples.size());

#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const DatasetSample& s = samples[static_cast<std::size_t>(k)];
    try {
      if (s.features.size() != mlp.inputs() || s.links != mlp.outputs()) {
        throw std::invalid_argument("sample dimensions do not match the network");
      }
      if (!(s.objective > 0.0)) continue;
      const ProblemInstance inst = defeaturize(s.features, s.links, mu, p_circuit);
      const Allocation p = powers_from_output(forward(mlp, s.features), inst);
      const double f = objective(p, inst, metric);
      rows[static_cast<std::size_t>(k)] = {static_cast<std::size_t>(k), s.objective, f,
                                           std::abs(s.objective - f) / s.objective};
      keep[static_cast<std::size_t>(k)] = 1;
    } catch (const std::exception& e) {
      failures[static_cast<std::size_t>(k)] = e.what();
    }
  }
  for (std::size_t k = 0; k < failures.size(); ++k) {
    if (!failures[k].empty()) {
      throw std::invalid_argument("evaluate: sample " + std::to_string(k) + ": " + failures[k]);
    }
  }

  EvalStats stats;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (keep[k]) {
      stats.samples.push_back(rows[k]);
      stats.errors.push_back(rows[k].error);
    } else {
      ++stats.skipped;
    }
  }
  if (!stats.errors.empty()) {
    stats.mean = std::accumulate(stats.errors.begin(), stats.errors.end(), 0.0) /
                 static_cast<double>(stats.errors.size());
    std::vector<double> sorted = stats.errors;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    stats.median = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  }
  stats.cdf = empirical_cdf(stats.errors, default_cdf_grid());
  return stats;
}

}  // namespace eepc
