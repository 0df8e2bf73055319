#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "obw/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"obstacle-walk: entropic repulsion experiments for random-walk "
               "bridges above concave obstacles"};
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("config", config_path, "path to a key = value config file")->required();

  CLI::App* check =
      app.add_subcommand("check", "exhaustive small-n consistency checks of the kernel engine");
  CLI::App* list = app.add_subcommand("list", "list registered experiments and step laws");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (run->parsed()) {
      return obw::run_experiment(obw::parse_config(config_path));
    }
    if (check->parsed()) {
      return obw::run_check();
    }
    if (list->parsed()) {
      std::cout << "experiments:\n";
      for (const auto& name : obw::registered_experiments()) std::cout << "  " << name << "\n";
      std::cout << "laws:\n";
      for (const auto& name : obw::registered_laws()) std::cout << "  " << name << "\n";
      return 0;
    }
  } catch (const obw::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
