#pragma once

#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace eepc::cli {

class Command {
 public:
  virtual ~Command() = default;
  /// Registers the subcommand and its options on `parent`.
  virtual CLI::App* add(CLI::App& parent) = 0;
  /// Runs after a successful parse; returns the process exit code.
  virtual int run(const CLI::App& sub, const std::vector<std::string>& argv) = 0;
};

std::unique_ptr<Command> make_solve_command();
std::unique_ptr<Command> make_dataset_command();
std::unique_ptr<Command> make_train_command();
std::unique_ptr<Command> make_eval_command();
std::unique_ptr<Command> make_sweep_command();

}  // namespace eepc::cli
