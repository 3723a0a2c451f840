#include "cli_support.hpp"

#include <cstdlib>

#include "eepc/config_file.hpp"

namespace eepc::cli {

namespace {

std::vector<double> broadcast(const std::string& text, std::size_t n, const char* what) {
  std::vector<double> v = parse_double_list(text);
  if (v.size() == 1 && n > 1) v.assign(n, v[0]);
  if (v.size() != n) {
    throw CLI::ValidationError(std::string(what), "expected " + std::to_string(n) + " values, got " +
                                                      std::to_string(v.size()));
  }
  return v;
}

}  // namespace

std::size_t resolve_workers(std::size_t flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("EEPC_WORKERS"); env != nullptr && *env != '\0') {
    try {
      return parse_size(env);
    } catch (const std::exception&) {
      throw CommandError(kUsage, std::string("EEPC_WORKERS is not a count: ") + env);
    }
  }
  return 0;
}

nlohmann::json base_manifest(const CLI::App& sub, const std::vector<std::string>& argv,
                             double wall_seconds) {
  nlohmann::json m;
  m["command"] = sub.get_name();
  m["tool_version"] = EEPC_VERSION;
  m["argv"] = argv;
  m["config"] = sub.config_to_str(true, false);
  m["wall_seconds"] = wall_seconds;
  return m;
}

void write_manifest(const std::string& path, const nlohmann::json& manifest) {
  write_file_atomic(path, manifest.dump(2) + "\n");
}

void ScenarioFlags::add_to(CLI::App& app) {
  app.add_option("--scenario", file, "key=value scenario file")->check(CLI::ExistingFile);
  app.add_option("--users", users, "links per channel (overrides the file)");
  app.add_option("--seed", seed, "master seed (overrides the file)");
  app.add_option("--pathloss", pathloss, "power-law | hata-cost231-urban");
  app.add_option("--shadowing-db", shadowing_db, "log-normal shadowing std. deviation");
  app.add_option("--bandwidth", bandwidth_hz, "bandwidth in Hz");
}

ScenarioConfig ScenarioFlags::resolve(const CLI::App& app) const {
  std::map<std::string, std::string> kv;
  if (!file.empty()) kv = read_key_value_file(file);
  ScenarioConfig cfg = ScenarioConfig::from_map(kv);
  if (app.count("--users")) cfg.users = users;
  if (app.count("--seed")) cfg.seed = seed;
  if (app.count("--pathloss")) cfg.pathloss = parse_pathloss_model(pathloss);
  if (app.count("--shadowing-db")) cfg.shadowing_db = shadowing_db;
  if (app.count("--bandwidth")) cfg.bandwidth_hz = bandwidth_hz;
  cfg.validate();
  return cfg;
}

void InstanceFlags::add_to(CLI::App& app) {
  app.add_option("--instance", file, "key=value instance file")->check(CLI::ExistingFile);
  app.add_option("--L", links, "number of links");
  app.add_option("--alpha", alpha, "direct gains, comma separated");
  app.add_option("--beta", beta, "cross gains beta(i,j), row-major without diagonal");
  app.add_option("--pmax-dbw", pmax_dbw, "power limit(s) in dBW");
  app.add_option("--mu", mu, "amplifier inefficiency (scalar or per link)")->default_str("4");
  app.add_option("--pc", pc, "circuit power in W (scalar or per link)")->default_str("1");
  app.add_option("--weights", weights, "link weights")->default_str("1");
  app.add_option("--bandwidth", bandwidth, "bandwidth in Hz used for reporting")
      ->capture_default_str();
}

ProblemInstance InstanceFlags::resolve(const CLI::App& app) const {
  std::map<std::string, std::string> kv;
  if (!file.empty()) kv = read_key_value_file(file);
  auto set = [&](const char* flag, const char* key, const std::string& value) {
    if (app.count(flag)) kv[key] = value;
  };
  if (app.count("--L")) kv["L"] = std::to_string(links);
  set("--alpha", "alpha", alpha);
  set("--beta", "beta", beta);
  set("--pmax-dbw", "pmax_dbw", pmax_dbw);
  set("--mu", "mu", mu);
  set("--pc", "pc", pc);
  set("--weights", "weights", weights);
  if (app.count("--bandwidth")) kv["bandwidth"] = format_double17(bandwidth);

  for (const auto& [key, value] : kv) {
    static const char* known[] = {"L", "alpha", "beta", "pmax_dbw", "mu", "pc", "weights",
                                  "bandwidth"};
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      throw CLI::ValidationError("--instance", "unknown key '" + key + "'");
    }
  }
  for (const char* required : {"L", "alpha", "pmax_dbw"}) {
    if (!kv.count(required)) {
      throw CLI::RequiredError(std::string(required) + " (flag or instance file)");
    }
  }
  const std::size_t l = parse_size(kv["L"]);
  if (l == 0) throw CLI::ValidationError("--L", "must be >= 1");
  const std::vector<double> a = broadcast(kv["alpha"], l, "--alpha");
  std::vector<double> b(l * (l - 1), 0.0);
  if (kv.count("beta") && l > 1) b = broadcast(kv["beta"], l * (l - 1), "--beta");
  std::vector<double> p = broadcast(kv["pmax_dbw"], l, "--pmax-dbw");
  for (double& v : p) v = dbw_to_watts(v);
  const std::vector<double> m = broadcast(kv.count("mu") ? kv["mu"] : "4", l, "--mu");
  const std::vector<double> c = broadcast(kv.count("pc") ? kv["pc"] : "1", l, "--pc");
  const std::vector<double> w = broadcast(kv.count("weights") ? kv["weights"] : "1", l, "--weights");
  const double bw = kv.count("bandwidth") ? parse_double(kv["bandwidth"]) : 180e3;
  return ProblemInstance(a, b, p, m, c, w, bw);
}

std::string join_doubles(const std::vector<double>& v, char sep) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) out += sep;
    out += format_double17(v[k]);
  }
  return out;
}

}  // namespace eepc::cli
