#include "eepc/scenario.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "eepc/config_file.hpp"

namespace eepc {

namespace {

constexpr double kSpeedOfLight = 299'792'458.0;
constexpr double kReferenceKm = 0.001;  // 1 m
constexpr double kHataBaseHeight = 30.0;
constexpr double kHataMobileHeight = 1.5;
constexpr double kMinAlpha = 1e-30;

std::vector<Point> parse_points(const std::string& text) {
  // "x:y;x:y;..."
  std::vector<Point> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("access point '" + item + "' is not x:y");
    }
    out.push_back({parse_double(item.substr(0, colon)), parse_double(item.substr(colon + 1))});
  }
  return out;
}

}  // namespace

PathLossModel parse_pathloss_model(const std::string& name) {
  if (name == "power-law") return PathLossModel::power_law;
  if (name == "hata-cost231-urban") return PathLossModel::hata_cost231_urban;
  throw std::invalid_argument("unknown path-loss model '" + name + "'");
}

std::string to_string(PathLossModel model) {
  return model == PathLossModel::power_law ? "power-law" : "hata-cost231-urban";
}

void ScenarioConfig::validate() const {
  if (users < 1) throw std::invalid_argument("ScenarioConfig: need at least one user");
  if (antennas < 1) throw std::invalid_argument("ScenarioConfig: need at least one antenna");
  if (!(edge_km > 0.0)) throw std::invalid_argument("ScenarioConfig: edge must be positive");
  if (access_points.empty()) throw std::invalid_argument("ScenarioConfig: no access points");
  if (!(carrier_ghz > 0.0) || !(bandwidth_hz > 0.0) || !(shadowing_db >= 0.0) ||
      !(decay_exponent > 0.0)) {
    throw std::invalid_argument("ScenarioConfig: invalid radio parameters");
  }
}

ScenarioConfig ScenarioConfig::from_map(const std::map<std::string, std::string>& kv) {
  ScenarioConfig c;
  for (const auto& [key, value] : kv) {
    if (key == "edge_km") c.edge_km = parse_double(value);
    else if (key == "access_points") c.access_points = parse_points(value);
    else if (key == "antennas") c.antennas = parse_size(value);
    else if (key == "carrier_ghz") c.carrier_ghz = parse_double(value);
    else if (key == "pathloss") c.pathloss = parse_pathloss_model(value);
    else if (key == "decay_exponent") c.decay_exponent = parse_double(value);
    else if (key == "shadowing_db") c.shadowing_db = parse_double(value);
    else if (key == "noise_figure_db") c.noise_figure_db = parse_double(value);
    else if (key == "bandwidth_hz") c.bandwidth_hz = parse_double(value);
    else if (key == "noise_density_dbm_hz") c.noise_density_dbm_hz = parse_double(value);
    else if (key == "users") c.users = parse_size(value);
    else if (key == "seed") c.seed = parse_u64(value);
    else throw std::invalid_argument("unknown scenario key '" + key + "'");
  }
  c.validate();
  return c;
}

std::map<std::string, std::string> ScenarioConfig::to_map() const {
  std::string aps;
  for (const Point& p : access_points) {
    if (!aps.empty()) aps += ';';
    aps += format_double(p.x_km) + ':' + format_double(p.y_km);
  }
  return {
      {"edge_km", format_double(edge_km)},
      {"access_points", aps},
      {"antennas", std::to_string(antennas)},
      {"carrier_ghz", format_double(carrier_ghz)},
      {"pathloss", to_string(pathloss)},
      {"decay_exponent", format_double(decay_exponent)},
      {"shadowing_db", format_double(shadowing_db)},
      {"noise_figure_db", format_double(noise_figure_db)},
      {"bandwidth_hz", format_double(bandwidth_hz)},
      {"noise_density_dbm_hz", format_double(noise_density_dbm_hz)},
      {"users", std::to_string(users)},
      {"seed", std::to_string(seed)},
  };
}

double pathloss_db(double distance_km, const ScenarioConfig& config) {
  if (!(distance_km > 0.0)) {
    throw std::invalid_argument("pathloss_db: distance must be positive");
  }
  if (config.pathloss == PathLossModel::power_law) {
    const double f_hz = config.carrier_ghz * 1e9;
    const double d0_m = kReferenceKm * 1000.0;
    const double intercept = 20.0 * std::log10(4.0 * std::numbers::pi * d0_m * f_hz / kSpeedOfLight);
    return intercept + 10.0 * config.decay_exponent * std::log10(distance_km / kReferenceKm);
  }
  // COST-231 Hata, medium-sized city mobile correction, no metropolitan offset
  const double f_mhz = config.carrier_ghz * 1e3;
  const double lf = std::log10(f_mhz);
  const double lhb = std::log10(kHataBaseHeight);
  const double mobile = (1.1 * lf - 0.7) * kHataMobileHeight - (1.56 * lf - 0.8);
  return 46.3 + 33.9 * lf - 13.82 * lhb - mobile + (44.9 - 6.55 * lhb) * std::log10(distance_km);
}

double noise_power(const ScenarioConfig& config) {
  const double dbm = config.noise_density_dbm_hz + config.noise_figure_db +
                     10.0 * std::log10(config.bandwidth_hz);
  return std::pow(10.0, (dbm - 30.0) / 10.0);
}

double dbw_to_watts(double dbw) { return std::pow(10.0, dbw / 10.0); }
double watts_to_dbw(double watts) { return 10.0 * std::log10(watts); }

double ChannelRealization::alpha_at(std::size_t ap, std::size_t user) const {
  double norm2 = 0.0;
  for (const auto& c : h(ap, user)) norm2 += std::norm(c);
  return norm2 / noise_power;
}

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 finalizer over a mix of both inputs
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ChannelRealization generate_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> place(0.0, config.edge_km);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const std::size_t l = config.users;
  const std::size_t aps = config.access_points.size();
  const std::size_t nr = config.antennas;

  ChannelRealization real;
  real.access_points = aps;
  real.antennas = nr;
  real.noise_power = noise_power(config);
  real.users.resize(l);
  for (Point& u : real.users) {
    u.x_km = place(rng);
    u.y_km = place(rng);
  }

  std::vector<double> amplitude(aps * l);
  for (std::size_t m = 0; m < aps; ++m) {
    for (std::size_t j = 0; j < l; ++j) {
      const double dx = real.users[j].x_km - config.access_points[m].x_km;
      const double dy = real.users[j].y_km - config.access_points[m].y_km;
      const double d = std::max(std::hypot(dx, dy), kReferenceKm);
      double loss = pathloss_db(d, config);
      if (config.shadowing_db > 0.0) loss += config.shadowing_db * gauss(rng);
      amplitude[m * l + j] = std::sqrt(std::pow(10.0, -loss / 10.0));
    }
  }

  real.channels.resize(aps * l * nr);
  real.serving.assign(l, 0);
  real.alpha.assign(l, 0.0);
  const double half = std::sqrt(0.5);
  for (bool ok = false; !ok;) {
    for (std::size_t m = 0; m < aps; ++m) {
      for (std::size_t j = 0; j < l; ++j) {
        for (std::size_t n = 0; n < nr; ++n) {
          const double re = half * gauss(rng);
          const double im = half * gauss(rng);
          real.channels[(m * l + j) * nr + n] = amplitude[m * l + j] * std::complex<double>(re, im);
        }
      }
    }
    ok = true;
    for (std::size_t i = 0; i < l; ++i) {
      std::size_t best = 0;
      double best_alpha = real.alpha_at(0, i);
      for (std::size_t m = 1; m < aps; ++m) {
        const double a = real.alpha_at(m, i);
        if (a > best_alpha) {
          best_alpha = a;
          best = m;
        }
      }
      real.serving[i] = best;
      real.alpha[i] = best_alpha;
      if (!(best_alpha > kMinAlpha)) ok = false;
    }
  }

  real.beta.assign(l * (l - 1), 0.0);
  for (std::size_t i = 0, k = 0; i < l; ++i) {
    const auto hi = real.h(real.serving[i], i);
    double norm2 = 0.0;
    for (const auto& c : hi) norm2 += std::norm(c);
    for (std::size_t j = 0; j < l; ++j) {
      if (j == i) continue;
      const auto hj = real.h(real.serving[i], j);
      std::complex<double> inner = 0.0;
      for (std::size_t n = 0; n < nr; ++n) inner += std::conj(hi[n]) * hj[n];
      real.beta[k++] = std::norm(inner) / (real.noise_power * norm2);
    }
  }
  return real;
}

ProblemInstance assemble_instance(const ChannelRealization& real, double p_max_dbw, double mu,
                                  double p_circuit, double weight, double bandwidth) {
  if (!std::isfinite(p_max_dbw)) {
    throw std::invalid_argument("assemble_instance: P_max must be finite");
  }
  const std::size_t l = real.alpha.size();
  return ProblemInstance(real.alpha, real.beta, std::vector<double>(l, dbw_to_watts(p_max_dbw)),
                         std::vector<double>(l, mu), std::vector<double>(l, p_circuit),
                         std::vector<double>(l, weight), bandwidth);
}

}  // namespace eepc
