#include <iostream>

#include "cli_support.hpp"
#include "commands.hpp"
#include "eepc/bb_solver.hpp"
#include "eepc/config_file.hpp"
#include "eepc/sca_solver.hpp"

namespace eepc::cli {

namespace {

Allocation denormalize(const Allocation& q, const ProblemInstance& inst) {
  Allocation p(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) p[i] = q[i] * inst.p_max(i);
  return p;
}

class SolveCommand : public Command {
 public:
  CLI::App* add(CLI::App& parent) override {
    CLI::App* sub = parent.add_subcommand("solve", "solve one instance");
    instance_.add_to(*sub);
    sub->add_option("--metric", metric_, "wsee | gee | wpee | wmee | wsr")->capture_default_str();
    sub->add_option("--solver", solver_, "bb | sca | sca-os | max-power | best-only")
        ->capture_default_str()
        ->check(CLI::IsMember({"bb", "sca", "sca-os", "max-power", "best-only"}));
    sub->add_option("--epsilon", epsilon_, "branch-and-bound tolerance")->capture_default_str();
    sub->add_option("--tolerance-mode", tol_mode_, "relative | absolute")
        ->capture_default_str()
        ->check(CLI::IsMember({"relative", "absolute"}));
    sub->add_option("--max-boxes", max_boxes_, "branch-and-bound box cap")->capture_default_str();
    sub->add_option("--time-limit", time_limit_, "seconds, 0 = unlimited")->capture_default_str();
    sub->add_option("--csv", csv_, "write the result row to this CSV file");
    sub->add_option("--manifest", manifest_, "manifest path (default <csv>.manifest.json)");
    return sub;
  }

  int run(const CLI::App& sub, const std::vector<std::string>& argv) override {
    Stopwatch clock;
    const ProblemInstance inst = instance_.resolve(sub);
    const Metric metric = parse_metric(metric_);
    const ProblemInstance norm = normalize_instance(inst);

    Allocation p;
    std::uint64_t iterations = 0;
    bool certified = true;
    double seconds = 0.0;
    if (solver_ == "bb") {
      SolveLimits limits;
      limits.max_boxes = max_boxes_;
      if (time_limit_ > 0.0) limits.max_seconds = time_limit_;
      const Tolerance tol = tol_mode_ == "absolute" ? Tolerance::absolute(epsilon_)
                                                    : Tolerance::relative(epsilon_);
      const SolveResult r = solve_global(norm, metric, tol, limits);
      p = denormalize(r.p, inst);
      iterations = r.iterations;
      certified = r.certified;
      seconds = r.wall_seconds;
    } else if (solver_ == "sca" || solver_ == "sca-os") {
      if (metric != Metric::wsee) {
        throw CommandError(kUsage, "--solver " + solver_ + " supports only --metric wsee");
      }
      const ScaResult r = solve_sca(norm, baseline(norm, Baseline::max_power));
      p = denormalize(r.result.p, inst);
      iterations = r.result.iterations;
      certified = r.result.certified;
      seconds = r.result.wall_seconds;
    } else {
      Stopwatch t;
      p = baseline(inst, solver_ == "max-power" ? Baseline::max_power : Baseline::best_only);
      seconds = t.seconds();
    }

    const double value = objective(p, inst, metric);
    const double reported = reported_objective(p, inst, metric) / 1e6;
    std::cout << "solver " << solver_ << '\n'
              << "metric " << to_string(metric) << '\n'
              << "p_w " << join_doubles(p) << '\n'
              << "objective_mbit_per_joule " << format_double17(reported) << '\n'
              << "objective_normalized " << format_double17(value) << '\n'
              << "iterations " << iterations << '\n'
              << "seconds " << format_double17(seconds) << '\n'
              << "certified " << (certified ? "true" : "false") << '\n';

    if (!csv_.empty()) {
      std::string text = "solver,metric,L,objective_mbit_per_joule,objective_normalized,"
                         "iterations,seconds,certified";
      for (std::size_t i = 0; i < p.size(); ++i) text += ",p_" + std::to_string(i);
      text += '\n';
      text += solver_ + ',' + std::string(to_string(metric)) + ',' + std::to_string(p.size()) +
              ',' + format_double17(reported) + ',' + format_double17(value) + ',' +
              std::to_string(iterations) + ',' + format_double17(seconds) + ',' +
              (certified ? "1" : "0") + ',' + join_doubles(p, ',') + '\n';
      write_file_atomic(csv_, text);
    }
    if (!csv_.empty() || !manifest_.empty()) {
      nlohmann::json m = base_manifest(sub, argv, clock.seconds());
      m["outputs"] = csv_.empty() ? nlohmann::json::array() : nlohmann::json::array({csv_});
      m["certified"] = certified;
      write_manifest(manifest_.empty() ? csv_ + ".manifest.json" : manifest_, m);
    }
    return certified ? kOk : kNumerical;
  }

 private:
  InstanceFlags instance_;
  std::string metric_ = "wsee";
  std::string solver_ = "bb";
  double epsilon_ = 0.01;
  std::string tol_mode_ = "relative";
  std::uint64_t max_boxes_ = 10'000'000;
  double time_limit_ = 0.0;
  std::string csv_;
  std::string manifest_;
};

}  // namespace

std::unique_ptr<Command> make_solve_command() { return std::make_unique<SolveCommand>(); }

}  // namespace eepc::cli
