#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "eepc/model.hpp"
#include "eepc/scenario.hpp"

namespace eepc::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNumerical = 2, kIo = 3 };

/// Thrown by a command to request a specific exit code with a message.
struct CommandError : std::runtime_error {
  CommandError(ExitCode c, const std::string& what) : std::runtime_error(what), code(c) {}
  ExitCode code;
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Worker count from --workers, else $EEPC_WORKERS, else 0 (all cores).
std::size_t resolve_workers(std::size_t flag_value);

/// Skeleton manifest: command, version, argv, the full option snapshot in the
/// --config file format, and wall time.
nlohmann::json base_manifest(const CLI::App& sub, const std::vector<std::string>& argv,
                             double wall_seconds);
void write_manifest(const std::string& path, const nlohmann::json& manifest);

/// Scenario options shared by `dataset` and `sweep`.
struct ScenarioFlags {
  std::string file;
  std::size_t users = 0;
  std::uint64_t seed = 0;
  std::string pathloss;
  double shadowing_db = -1.0;
  double bandwidth_hz = 0.0;

  void add_to(CLI::App& app);
  ScenarioConfig resolve(const CLI::App& app) const;
};

/// Instance given by flags and/or a key=value file.
struct InstanceFlags {
  std::string file;
  std::size_t links = 0;
  std::string alpha, beta, pmax_dbw, mu, pc, weights;
  double bandwidth = 180e3;

  void add_to(CLI::App& app);
  ProblemInstance resolve(const CLI::App& app) const;
};

std::string join_doubles(const std::vector<double>& v, char sep = ' ');

}  // namespace eepc::cli
