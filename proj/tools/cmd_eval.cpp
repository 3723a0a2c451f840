#include <iostream>
#include <map>

#include "cli_support.hpp"
#include "commands.hpp"
#include "eepc/config_file.hpp"
#include "eepc/training.hpp"

namespace eepc::cli {

namespace {

class EvalCommand : public Command {
 public:
  CLI::App* add(CLI::App& parent) override {
    CLI::App* sub = parent.add_subcommand("eval", "evaluate a trained network on a dataset");
    sub->add_option("--model", model_, "model file")->required()->check(CLI::ExistingFile);
    sub->add_option("--test", test_, "labeled dataset CSV")->required()->check(CLI::ExistingFile);
    sub->add_option("--mu", mu_, "amplifier inefficiency used for labeling")
        ->capture_default_str();
    sub->add_option("--pc", pc_, "circuit power in W used for labeling")->capture_default_str();
    sub->add_option("--bandwidth", bandwidth_, "bandwidth in Hz for reported values")
        ->capture_default_str();
    sub->add_option("--out", prefix_,
                    "output prefix: <out>.stats.csv, .cdf.csv, .curve.csv, .errors.csv")
        ->required();
    return sub;
  }

  int run(const CLI::App& sub, const std::vector<std::string>& argv) override {
    Stopwatch clock;
    const Mlp net = load_mlp(model_);
    const std::vector<DatasetSample> samples = read_dataset(test_);
    if (!samples.empty() && (samples.front().links != net.outputs() ||
                             samples.front().features.size() != net.inputs())) {
      throw CommandError(kUsage, "--test: dataset L=" + std::to_string(samples.front().links) +
                                     " does not match the model");
    }
    const EvalStats stats = evaluate(net, samples, mu_, pc_);
    const double scale = bandwidth_ / 1e6;

    const std::string stats_path = prefix_ + ".stats.csv";
    write_file_atomic(stats_path, "samples,skipped,mean_error,median_error\n" +
                                      std::to_string(stats.errors.size()) + ',' +
                                      std::to_string(stats.skipped) + ',' +
                                      format_double17(stats.mean) + ',' +
                                      format_double17(stats.median) + '\n');

    const std::string cdf_path = prefix_ + ".cdf.csv";
    std::string cdf = "error,fraction\n";
    for (const CdfPoint& c : stats.cdf) {
      cdf += format_double17(c.error) + ',' + format_double17(c.fraction) + '\n';
    }
    write_file_atomic(cdf_path, cdf);

    struct Acc {
      std::size_t n = 0;
      double optimal = 0.0;
      double predicted = 0.0;
    };
    std::map<double, Acc> curve;
    const std::string errors_path = prefix_ + ".errors.csv";
    std::string errors = "channel_id,pmax_dbw,optimal_mbit_per_joule,predicted_mbit_per_joule,error\n";
    for (const SampleEval& e : stats.samples) {
      const DatasetSample& s = samples[e.index];
      Acc& a = curve[s.pmax_dbw];
      ++a.n;
      a.optimal += e.optimal * scale;
      a.predicted += e.predicted * scale;
      errors += std::to_string(s.channel_id) + ',' + format_double17(s.pmax_dbw) + ',' +
                format_double17(e.optimal * scale) + ',' + format_double17(e.predicted * scale) +
                ',' + format_double17(e.error) + '\n';
    }
    write_file_atomic(errors_path, errors);

    const std::string curve_path = prefix_ + ".curve.csv";
    std::string table = "pmax_dbw,samples,optimal_mbit_per_joule,predicted_mbit_per_joule\n";
    for (const auto& [pmax, a] : curve) {
      table += format_double17(pmax) + ',' + std::to_string(a.n) + ',' +
               format_double17(a.optimal / static_cast<double>(a.n)) + ',' +
               format_double17(a.predicted / static_cast<double>(a.n)) + '\n';
    }
    write_file_atomic(curve_path, table);

    std::cout << "samples " << stats.errors.size() << '\n'
              << "skipped " << stats.skipped << '\n'
              << "mean_error " << format_double17(stats.mean) << '\n'
              << "median_error " << format_double17(stats.median) << '\n';

    nlohmann::json m = base_manifest(sub, argv, clock.seconds());
    m["outputs"] = {stats_path, cdf_path, curve_path, errors_path};
    m["mean_error"] = stats.mean;
    m["median_error"] = stats.median;
    write_manifest(prefix_ + ".manifest.json", m);
    return kOk;
  }

 private:
  std::string model_;
  std::string test_;
  double mu_ = 4.0;
  double pc_ = 1.0;
  double bandwidth_ = 180e3;
  std::string prefix_;
};

}  // namespace

std::unique_ptr<Command> make_eval_command() { return std::make_unique<EvalCommand>(); }

}  // namespace eepc::cli
