#include <iostream>
#include <map>

#include "cli11/CLI11.hpp"
#include "commands.hpp"
#include "landscape/errors.hpp"

using namespace landscape::cli;

int main(int argc, char** argv) {
  CLI::App app{"Construct, certify and escape suboptimal regions of neural-network loss surfaces"};
  app.require_subcommand(1);

  std::string config_file;
  Overrides overrides;
  app.add_option("--config", config_file, "TOML experiment config")->required();
  app.add_option("--out", overrides.out, "Output directory (overrides [output].dir)");
  app.add_option("--seed-data", overrides.seed_data, "Data seed override");
  app.add_option("--lambda", overrides.lambda, "Embedding lambda override");

  const std::map<std::string, int (*)(const ExperimentConfig&)> commands{
      {"region", cmd_region}, {"path", cmd_path},   {"infinity", cmd_infinity},
      {"train", cmd_train},   {"probe", cmd_probe}, {"embed", cmd_embed},
  };
  const std::map<std::string, std::string> help{
      {"region", "Build a suboptimal region, walk it to a saddle and escape"},
      {"path", "Non-increasing path to a global minimum for a wide network"},
      {"infinity", "Witness a local minimum at infinity"},
      {"train", "Train the student network to a critical point"},
      {"probe", "Probe the loss along random directions"},
      {"embed", "Grow a network by neuron embeddings"},
  };
  for (const auto& [name, fn] : commands) app.add_subcommand(name, help.at(name))->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const ExperimentConfig cfg = load_config(config_file, overrides);
    return commands.at(name)(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const landscape::PlanError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const landscape::FormatError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const landscape::ShapeError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << name << " failed: " << e.what() << "\n";
    return kExitFailed;
  }
}
