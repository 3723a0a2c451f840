#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "eepc/model.hpp"

namespace eepc {

enum class PathLossModel { power_law, hata_cost231_urban };

PathLossModel parse_pathloss_model(const std::string& name);
std::string to_string(PathLossModel model);

struct Point {
  double x_km = 0.0;
  double y_km = 0.0;
};

/// Uplink deployment: users dropped uniformly in a square served by fixed
/// multi-antenna access points.
struct ScenarioConfig {
  double edge_km = 2.0;
  std::vector<Point> access_points{{0.5, 0.5}, {0.5, 1.5}, {1.5, 0.5}, {1.5, 1.5}};
  std::size_t antennas = 2;
  double carrier_ghz = 1.8;
  PathLossModel pathloss = PathLossModel::power_law;
  double decay_exponent = 4.5;
  double shadowing_db = 0.0;  // log-normal std. deviation, 0 disables
  double noise_figure_db = 3.0;
  double bandwidth_hz = 180e3;
  double noise_density_dbm_hz = -174.0;
  std::size_t users = 4;
  std::uint64_t seed = 1;

  void validate() const;

  /// Recognized keys match `to_map`; unknown keys throw std::invalid_argument.
  static ScenarioConfig from_map(const std::map<std::string, std::string>& kv);
  std::map<std::string, std::string> to_map() const;
};

/// Attenuation in dB at `distance_km`. Throws std::invalid_argument for
/// non-positive distances.
double pathloss_db(double distance_km, const ScenarioConfig& config);

/// sigma^2 = F N0 B in watts.
double noise_power(const ScenarioConfig& config);

double dbw_to_watts(double dbw);
double watts_to_dbw(double watts);

struct ChannelRealization {
  std::vector<Point> users;
  std::size_t access_points = 0;
  std::size_t antennas = 0;
  double noise_power = 0.0;
  /// h(m, j) stacked as [m][j][antenna]
  std::vector<std::complex<double>> channels;
  std::vector<std::size_t> serving;
  std::vector<double> alpha;
  std::vector<double> beta;  // row-major, diagonal skipped

  std::span<const std::complex<double>> h(std::size_t ap, std::size_t user) const {
    return {channels.data() + (ap * users.size() + user) * antennas, antennas};
  }
  /// Effective channel-to-noise ratio of `user` if it were served by `ap`.
  double alpha_at(std::size_t ap, std::size_t user) const;
};

/// Independent RNG seed for stream `index` of a master seed.
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index);

/// Deterministic in (config, seed).
ChannelRealization generate_scenario(const ScenarioConfig& config, std::uint64_t seed);

/// All links share P_max = 10^(p_max_dbw / 10) W.
ProblemInstance assemble_instance(const ChannelRealization& real, double p_max_dbw, double mu,
                                  double p_circuit, double weight, double bandwidth);

}  // namespace eepc
