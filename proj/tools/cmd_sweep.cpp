#include <omp.h>

#include <algorithm>
#include <iostream>
#include <optional>
#include <sstream>

#include "cli_support.hpp"
#include "commands.hpp"
#include "eepc/config_file.hpp"
#include "eepc/pipeline.hpp"

namespace eepc::cli {

namespace {

constexpr Method kColumnOrder[] = {Method::optimal, Method::ann,       Method::sca,
                                   Method::sca_os,  Method::max_power, Method::best_only};

std::string column_name(Method m) {
  std::string s = to_string(m);
  std::replace(s.begin(), s.end(), '-', '_');
  return s;
}

class SweepCommand : public Command {
 public:
  CLI::App* add(CLI::App& parent) override {
    CLI::App* sub = parent.add_subcommand("sweep", "compare methods over a P_max grid");
    scenario_.add_to(*sub);
    sub->add_option("--channels", channels_, "number of channel realizations")->required();
    sub->add_option("--first-channel", first_channel_, "id of the first channel")
        ->capture_default_str();
    sub->add_option("--pmax-grid", grid_, "start:stop:step in dBW, or a list")
        ->capture_default_str();
    sub->add_option("--mu", mu_, "amplifier inefficiency")->capture_default_str();
    sub->add_option("--pc", pc_, "circuit power in W")->capture_default_str();
    sub->add_option("--epsilon", epsilon_, "relative tolerance of the global solver")
        ->capture_default_str();
    sub->add_option("--methods", methods_,
                    "comma list of optimal, ann, sca, sca-os, max-power, best-only "
                    "(default: all, ann only with --model)");
    sub->add_option("--model", model_, "trained model for the ann method")
        ->check(CLI::ExistingFile);
    sub->add_option("--workers", workers_, "worker threads (default $EEPC_WORKERS or all cores)");
    sub->add_option("--out", out_, "averaged comparison CSV")->required();
    sub->add_option("--per-channel", per_channel_, "per-channel comparison CSV");
    sub->add_option("--manifest", manifest_, "manifest path (default <out>.manifest.json)");
    return sub;
  }

  int run(const CLI::App& sub, const std::vector<std::string>& argv) override {
    Stopwatch clock;
    DatasetJob job;
    job.scenario = scenario_.resolve(sub);
    job.pmax_dbw = parse_grid(grid_);
    std::sort(job.pmax_dbw.begin(), job.pmax_dbw.end());

    std::vector<Method> requested;
    if (methods_.empty()) {
      for (Method m : kColumnOrder) {
        if (m != Method::ann || !model_.empty()) requested.push_back(m);
      }
    } else {
      std::stringstream ss(methods_);
      std::string item;
      while (std::getline(ss, item, ',')) requested.push_back(parse_method(item));
    }
    std::vector<Method> methods;
    for (Method m : kColumnOrder) {
      if (std::find(requested.begin(), requested.end(), m) != requested.end()) {
        methods.push_back(m);
      }
    }
    const bool wants_ann = std::find(methods.begin(), methods.end(), Method::ann) != methods.end();
    if (wants_ann && model_.empty()) {
      throw CommandError(kUsage, "method ann needs a trained network: pass --model");
    }
    std::optional<Mlp> net;
    if (wants_ann) {
      net = load_mlp(model_);
      if (net->outputs() != job.scenario.users) {
        throw CommandError(kUsage, "--model: network size does not match --users");
      }
    }

    const std::size_t workers = resolve_workers(workers_);
    const int threads = workers > 0 ? static_cast<int>(workers) : omp_get_max_threads();
    std::vector<ChannelSweep> rows(channels_);
    std::vector<std::string> failures(channels_);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(channels_); ++c) {
      const std::uint64_t id = first_channel_ + static_cast<std::uint64_t>(c);
      try {
        rows[static_cast<std::size_t>(c)] =
            sweep_channel(job_channel(job, id), id, job.pmax_dbw, mu_, pc_, methods,
                          net ? &*net : nullptr, Tolerance::relative(epsilon_));
      } catch (const std::exception& e) {
        failures[static_cast<std::size_t>(c)] = e.what();
      }
    }
    for (std::size_t c = 0; c < channels_; ++c) {
      if (!failures[c].empty()) {
        throw std::runtime_error("channel " + std::to_string(first_channel_ + c) + ": " +
                                 failures[c]);
      }
    }

    const double scale = job.scenario.bandwidth_hz / 1e6;
    std::string header = "pmax_dbw";
    for (Method m : methods) header += ',' + column_name(m);
    std::string table = header + '\n';
    std::string detail = "channel_id," + header + '\n';
    bool certified = true;
    for (const ChannelSweep& r : rows) certified = certified && r.certified;
    for (std::size_t g = 0; g < job.pmax_dbw.size(); ++g) {
      table += format_double17(job.pmax_dbw[g]);
      for (std::size_t k = 0; k < methods.size(); ++k) {
        double acc = 0.0;
        for (const ChannelSweep& r : rows) acc += r.values[k][g];
        table += ',' + format_double17(scale * acc / static_cast<double>(rows.size()));
      }
      table += '\n';
    }
    for (const ChannelSweep& r : rows) {
      for (std::size_t g = 0; g < job.pmax_dbw.size(); ++g) {
        detail += std::to_string(r.channel_id) + ',' + format_double17(job.pmax_dbw[g]);
        for (std::size_t k = 0; k < methods.size(); ++k) {
          detail += ',' + format_double17(scale * r.values[k][g]);
        }
        detail += '\n';
      }
    }
    write_file_atomic(out_, table);
    std::vector<std::string> outputs{out_};
    if (!per_channel_.empty()) {
      write_file_atomic(per_channel_, detail);
      outputs.push_back(per_channel_);
    }
    std::cout << table;

    nlohmann::json m = base_manifest(sub, argv, clock.seconds());
    m["outputs"] = outputs;
    m["seeds"] = {{"master", job.scenario.seed},
                  {"first_channel", first_channel_},
                  {"channels", channels_}};
    m["scenario"] = job.scenario.to_map();
    m["certified"] = certified;
    write_manifest(manifest_.empty() ? out_ + ".manifest.json" : manifest_, m);
    return certified ? kOk : kNumerical;
  }

 private:
  ScenarioFlags scenario_;
  std::size_t channels_ = 0;
  std::uint64_t first_channel_ = 0;
  std::string grid_ = "-30:20:1";
  double mu_ = 4.0;
  double pc_ = 1.0;
  double epsilon_ = 0.01;
  std::string methods_;
  std::string model_;
  std::size_t workers_ = 0;
  std::string out_;
  std::string per_channel_;
  std::string manifest_;
};

}  // namespace

std::unique_ptr<Command> make_sweep_command() { return std::make_unique<SweepCommand>(); }

}  // namespace eepc::cli
