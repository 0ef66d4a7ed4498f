#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "covlab/harness.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

int report_validation(const covlab::ValidationError& e) {
  std::cerr << "covlab: invalid field '" << e.field() << "': " << e.what() << "\n";
  return kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"covlab: coverage-process experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> replicates;
  std::optional<std::string> out;
  std::optional<std::string> format;

  auto* run = app.add_subcommand("run", "run an experiment");
  run->add_option("--config", config_path, "config file")->required();
  run->add_option("--seed", seed, "64-bit seed (overrides the config)");
  run->add_option("--replicates", replicates, "replicate count (overrides the config)");
  run->add_option("--out", out, "output path; standard output when absent");
  run->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "check a config without running it");
  validate->add_option("--config", validate_path, "config file")->required();

  auto* list = app.add_subcommand("list-experiments", "print the experiment kinds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*list) {
      for (const auto& k : covlab::experiment_registry()) std::cout << k.name << "\t" << k.description << "\n";
      return 0;
    }
    if (*validate) {
      const auto cfg = covlab::make_experiment_config(covlab::load_config(validate_path));
      covlab::prepare_experiment(cfg);
      std::cout << "ok " << cfg.kind << " " << cfg.hash() << "\n";
      return 0;
    }
    const auto cfg = covlab::make_experiment_config(covlab::load_config(config_path), {seed, replicates, out, format});
    const auto result = covlab::run_experiment(cfg);
    const auto text = covlab::render(result, cfg.format);
    if (cfg.out.empty()) std::cout << text;
    else covlab::write_atomic(cfg.out, text);
    return 0;
  } catch (const covlab::ValidationError& e) {
    return report_validation(e);
  } catch (const std::exception& e) {
    std::cerr << "covlab: " << e.what() << "\n";
    return kExitRuntime;
  }
}
