#include <algorithm>
#include <iostream>

#include "cli_support.hpp"
#include "commands.hpp"
#include "eepc/config_file.hpp"
#include "eepc/pipeline.hpp"

namespace eepc::cli {

namespace {

std::string csv_safe(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

class DatasetCommand : public Command {
 public:
  CLI::App* add(CLI::App& parent) override {
    CLI::App* sub = parent.add_subcommand("dataset", "generate a labeled dataset");
    scenario_.add_to(*sub);
    sub->add_option("--channels", channels_, "number of channel realizations")->required();
    sub->add_option("--first-channel", first_channel_, "id of the first channel")
        ->capture_default_str();
    sub->add_option("--pmax-grid", grid_, "start:stop:step in dBW, or a list")
        ->capture_default_str();
    sub->add_option("--mu", mu_, "amplifier inefficiency")->capture_default_str();
    sub->add_option("--pc", pc_, "circuit power in W")->capture_default_str();
    sub->add_option("--epsilon", epsilon_, "relative tolerance of the labels")
        ->capture_default_str();
    sub->add_option("--max-boxes", max_boxes_, "box cap per sample")->capture_default_str();
    sub->add_option("--time-limit", time_limit_, "seconds per sample, 0 = unlimited")
        ->capture_default_str();
    sub->add_option("--workers", workers_, "worker threads (default $EEPC_WORKERS or all cores)");
    sub->add_option("--out", out_, "dataset CSV")->required();
    sub->add_option("--timings", timings_, "per-sample timing CSV (default <out>.timings.csv)");
    sub->add_option("--manifest", manifest_, "manifest path (default <out>.manifest.json)");
    return sub;
  }

  int run(const CLI::App& sub, const std::vector<std::string>& argv) override {
    Stopwatch clock;
    DatasetJob job;
    job.scenario = scenario_.resolve(sub);
    job.channels = channels_;
    job.first_channel = first_channel_;
    job.pmax_dbw = parse_grid(grid_);
    job.mu = mu_;
    job.p_circuit = pc_;
    job.tolerance = Tolerance::relative(epsilon_);
    job.max_boxes = max_boxes_;
    job.max_seconds = time_limit_;
    const std::size_t workers = resolve_workers(workers_);

    const DatasetRun run = generate_dataset(job, workers);
    write_dataset(out_, run.samples, job.scenario.users);

    const std::string timings = timings_.empty() ? out_ + ".timings.csv" : timings_;
    std::string text = "channel_id,pmax_dbw,seconds,iterations,certified,error\n";
    std::vector<double> secs;
    for (const SampleReport& r : run.reports) {
      text += std::to_string(r.channel_id) + ',' + format_double17(r.pmax_dbw) + ',' +
              format_double17(r.seconds) + ',' + std::to_string(r.iterations) + ',' +
              (r.certified ? "1" : "0") + ',' + csv_safe(r.error) + '\n';
      if (r.error.empty()) secs.push_back(r.seconds);
    }
    write_file_atomic(timings, text);

    double median = 0.0;
    if (!secs.empty()) {
      std::nth_element(secs.begin(), secs.begin() + secs.size() / 2, secs.end());
      median = secs[secs.size() / 2];
    }
    std::cout << "samples " << run.samples.size() << '\n'
              << "flagged " << run.flagged << '\n'
              << "median_solve_seconds " << format_double17(median) << '\n';

    nlohmann::json m = base_manifest(sub, argv, clock.seconds());
    m["outputs"] = {out_, timings};
    m["seeds"] = {{"master", job.scenario.seed},
                  {"first_channel", job.first_channel},
                  {"channels", job.channels}};
    m["scenario"] = job.scenario.to_map();
    m["samples"] = run.samples.size();
    m["flagged"] = run.flagged;
    m["median_solve_seconds"] = median;
    write_manifest(manifest_.empty() ? out_ + ".manifest.json" : manifest_, m);
    if (run.flagged > 0) {
      std::cerr << "warning: " << run.flagged << " samples flagged (see " << timings << ")\n";
      return kNumerical;
    }
    return kOk;
  }

 private:
  ScenarioFlags scenario_;
  std::size_t channels_ = 0;
  std::uint64_t first_channel_ = 0;
  std::string grid_ = "-30:20:1";
  double mu_ = 4.0;
  double pc_ = 1.0;
  double epsilon_ = 0.01;
  std::uint64_t max_boxes_ = 10'000'000;
  double time_limit_ = 0.0;
  std::size_t workers_ = 0;
  std::string out_;
  std::string timings_;
  std::string manifest_;
};

}  // namespace

std::unique_ptr<Command> make_dataset_command() { return std::make_unique<DatasetCommand>(); }

}  // namespace eepc::cli
