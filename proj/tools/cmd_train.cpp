#include <iostream>

#include "cli_support.hpp"
#include "commands.hpp"
#include "eepc/config_file.hpp"
#include "eepc/training.hpp"

namespace eepc::cli {

namespace {

class TrainCommand : public Command {
 public:
  CLI::App* add(CLI::App& parent) override {
    CLI::App* sub = parent.add_subcommand("train", "train a network on a dataset");
    sub->add_option("--train", train_, "training dataset CSV")->required()->check(CLI::ExistingFile);
    sub->add_option("--val", val_, "validation dataset CSV")->check(CLI::ExistingFile);
    sub->add_option("--arch", arch_, "paper | small | wide | width:act,...")->capture_default_str();
    sub->add_option("--epochs", cfg_.epochs, "training epochs")->capture_default_str();
    sub->add_option("--batch", cfg_.batch, "batch size")->capture_default_str();
    sub->add_option("--lr", cfg_.nadam.learning_rate, "learning rate")->capture_default_str();
    sub->add_option("--seed", cfg_.seed, "seed for initialization and shuffling")
        ->capture_default_str();
    sub->add_flag("--no-shuffle", no_shuffle_, "keep the sample order fixed");
    sub->add_flag("--no-augment", no_augment_, "disable per-batch link permutations");
    sub->add_flag("--progress", progress_, "print every epoch to stderr");
    sub->add_option("--model", model_, "output model file")->required();
    sub->add_option("--history", history_, "history CSV (default <model>.history.csv)");
    sub->add_option("--manifest", manifest_, "manifest path (default <model>.manifest.json)");
    return sub;
  }

  int run(const CLI::App& sub, const std::vector<std::string>& argv) override {
    Stopwatch clock;
    cfg_.shuffle = !no_shuffle_;
    cfg_.augment = !no_augment_;
    cfg_.validate();
    const std::vector<DatasetSample> train_set = read_dataset(train_);
    if (train_set.empty()) throw CommandError(kUsage, "--train: dataset has no rows");
    std::vector<DatasetSample> val_set;
    if (!val_.empty()) val_set = read_dataset(val_);
    const std::size_t links = train_set.front().links;
    if (!val_set.empty() && val_set.front().links != links) {
      throw CommandError(kUsage, "--val: dataset L differs from the training set");
    }

    const Architecture arch = Architecture::parse(arch_, links);
    Mlp net = init_mlp(arch, cfg_.seed);
    EpochCallback cb;
    if (progress_) {
      cb = [](std::size_t epoch, double tr, double va) {
        std::cerr << "epoch " << epoch << " train " << tr << " val " << va << '\n';
      };
    }
    const TrainResult result = train(std::move(net), train_set, val_set, cfg_, cb);
    save_mlp(model_, result.model);

    const std::string history = history_.empty() ? model_ + ".history.csv" : history_;
    std::string text = "epoch,train_mse,val_mse\n";
    for (std::size_t e = 0; e < result.history.train_mse.size(); ++e) {
      text += std::to_string(e + 1) + ',' + format_double17(result.history.train_mse[e]) + ',' +
              format_double17(result.history.val_mse[e]) + '\n';
    }
    write_file_atomic(history, text);

    std::cout << "parameters " << result.model.parameter_count() << '\n'
              << "final_train_mse " << format_double17(result.history.train_mse.back()) << '\n'
              << "final_val_mse " << format_double17(result.history.val_mse.back()) << '\n';

    nlohmann::json m = base_manifest(sub, argv, clock.seconds());
    m["outputs"] = {model_, history};
    m["seeds"] = {{"train", cfg_.seed}};
    m["train_samples"] = train_set.size();
    m["val_samples"] = val_set.size();
    write_manifest(manifest_.empty() ? model_ + ".manifest.json" : manifest_, m);
    return kOk;
  }

 private:
  std::string train_;
  std::string val_;
  std::string arch_ = "paper";
  TrainConfig cfg_;
  bool no_shuffle_ = false;
  bool no_augment_ = false;
  bool progress_ = false;
  std::string model_;
  std::string history_;
  std::string manifest_;
};

}  // namespace

std::unique_ptr<Command> make_train_command() { return std::make_unique<TrainCommand>(); }

}  // namespace eepc::cli
