#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "eepc/bb_solver.hpp"
#include "eepc/dataset.hpp"
#include "eepc/mlp.hpp"
#include "eepc/scenario.hpp"

namespace eepc {

struct DatasetJob {
  ScenarioConfig scenario;
  std::size_t channels = 1;
  std::uint64_t first_channel = 0;  // channel ids are first_channel .. first_channel + channels - 1
  std::vector<double> pmax_dbw;
  double mu = 4.0;
  double p_circuit = 1.0;
  Tolerance tolerance = Tolerance::relative(0.01);
  std::uint64_t max_boxes = 10'000'000;
  double max_seconds = 0.0;  // per sample; 0 means unlimited
  double clip = kDefaultClip;

  void validate() const;
};

struct SampleReport {
  std::uint64_t channel_id = 0;
  double pmax_dbw = 0.0;
  double seconds = 0.0;
  std::uint64_t iterations = 0;
  bool certified = false;
  std::string error;  // empty on success

  bool flagged() const { return !certified || !error.empty(); }
};

struct DatasetRun {
  std::vector<DatasetSample> samples;  // ordered by (channel id, grid index)
  std::vector<SampleReport> reports;   // same order; failed samples have no row in `samples`
  std::size_t flagged = 0;
};

/// Channel `id` of the job, drawn from its own RNG stream.
ChannelRealization job_channel(const DatasetJob& job, std::uint64_t id);

/// Labels every (channel, P_max) pair with the global solver. `workers` = 0
/// uses the OpenMP default. Output does not depend on the worker count.
DatasetRun generate_dataset(const DatasetJob& job, std::size_t workers = 0);

/// One labeled sample from an instance; throws if the solve is not certified.
DatasetSample label_instance(const ProblemInstance& inst, std::uint64_t channel_id,
                             double pmax_dbw, const Tolerance& tol, double clip = kDefaultClip);

enum class Method { optimal, ann, sca, sca_os, max_power, best_only };

/// "optimal", "ann", "sca", "sca-os", "max-power", "best-only"
Method parse_method(const std::string& name);
std::string to_string(Method method);

struct ChannelSweep {
  std::uint64_t channel_id = 0;
  std::vector<double> pmax_dbw;
  std::vector<Method> methods;
  /// values[m][g]: bandwidth-free WSEE of methods[m] at grid point g
  std::vector<std::vector<double>> values;
  bool certified = true;  // every global solve finished within its tolerance
};

/// Compares the requested methods on one channel over an ascending P_max grid.
/// `model` is required when Method::ann is requested.
ChannelSweep sweep_channel(const ChannelRealization& channel, std::uint64_t channel_id,
                           std::span<const double> pmax_dbw, double mu, double p_circuit,
                           std::span<const Method> methods, const Mlp* model = nullptr,
                           const Tolerance& tol = Tolerance::relative(0.01));

}  // namespace eepc
