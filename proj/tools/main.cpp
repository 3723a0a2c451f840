#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli_support.hpp"
#include "commands.hpp"
#include "eepc/config_file.hpp"
#include "eepc/dataset.hpp"

int main(int argc, char** argv) {
  using namespace eepc::cli;
  CLI::App app{"Energy-efficient power control: global solver, SCA and learned allocations"};
  app.set_version_flag("--version", EEPC_VERSION);
  app.set_config("--config", "", "read options from a key=value file ([subcommand] sections)");
  app.require_subcommand(1);

  std::vector<std::unique_ptr<Command>> commands;
  commands.push_back(make_solve_command());
  commands.push_back(make_dataset_command());
  commands.push_back(make_train_command());
  commands.push_back(make_eval_command());
  commands.push_back(make_sweep_command());
  std::vector<CLI::App*> subs;
  for (auto& c : commands) subs.push_back(c->add(app));

  const std::vector<std::string> args(argv, argv + argc);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    for (std::size_t k = 0; k < subs.size(); ++k) {
      if (subs[k]->parsed()) return commands[k]->run(*subs[k], args);
    }
    return kUsage;
  } catch (const CommandError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const eepc::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const eepc::SchemaError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  }
}
