#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "eepc/dataset.hpp"
#include "eepc/mlp.hpp"
#include "eepc/model.hpp"

namespace eepc {

struct TrainConfig {
  std::size_t epochs = 500;
  std::size_t batch = 128;
  NadamConfig nadam;
  bool shuffle = true;
  bool augment = true;  // fresh random link permutation for every batch
  std::uint64_t seed = 1;
  double clip = kDefaultClip;

  void validate() const;
};

/// Relabels the links of a sample: link i of the result is link sigma[i] of
/// `sample`. Cross terms move as (i, j) -> (sigma[i], sigma[j]).
DatasetSample augment_permute(const DatasetSample& sample, std::span<const std::size_t> sigma);

struct TrainHistory {
  std::vector<double> train_mse;  // sample-weighted mean of the batch losses
  std::vector<double> val_mse;    // un-augmented; NaN without validation data
};

struct TrainResult {
  Mlp model;
  TrainHistory history;
};

using EpochCallback = std::function<void(std::size_t epoch, double train_mse, double val_mse)>;

/// Deterministic in (mlp, data, cfg).
TrainResult train(Mlp mlp, std::span<const DatasetSample> train_set,
                  std::span<const DatasetSample> val_set, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

/// Network outputs read as log10 of normalized powers, clipped to [0, 1] and
/// scaled by the power limits. Always feasible.
Allocation predict_powers(const Mlp& mlp, const ProblemInstance& inst,
                          double clip = kDefaultClip);

/// Same conversion starting from an already computed output vector.
Allocation powers_from_output(std::span<const double> output, const ProblemInstance& inst);

struct CdfPoint {
  double error;
  double fraction;  // share of samples with relative error <= error
};

struct SampleEval {
  std::size_t index;  // position in the evaluated sample list
  double optimal;
  double predicted;
  double error;
};

struct EvalStats {
  std::vector<SampleEval> samples;  // evaluated samples only
  std::vector<double> errors;       // |f* - f(p^)| / f*, same order as `samples`
  double mean = 0.0;
  double median = 0.0;
  std::vector<CdfPoint> cdf;
  std::size_t skipped = 0;  // samples with zero optimal objective
};

/// Empirical CDF of `errors` at the given abscissae.
std::vector<CdfPoint> empirical_cdf(std::span<const double> errors, std::span<const double> grid);

/// 1e-6 .. 1 with ten points per decade.
std::vector<double> default_cdf_grid();

/// Relative WSEE error of the network's prediction on every sample, against
/// the stored optimal objective. Parallel over samples.
EvalStats evaluate(const Mlp& mlp, std::span<const DatasetSample> samples, double mu,
                   double p_circuit, Metric metric = Metric::wsee);

}  // namespace eepc
