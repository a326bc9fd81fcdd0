#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "cli/commands.hpp"
#include "elastobayes/errors.hpp"

using namespace elastobayes;

int main(int argc, char** argv) {
  CLI::App app{"Bayesian elastography inversion with model-discrepancy learning"};
  app.require_subcommand(1);
  std::string config_file;
  std::map<std::string, std::string> values;
  app.add_option("-c,--config", config_file, "key = value configuration file");

  auto* generate = app.add_subcommand("generate", "write a synthetic dataset");
  auto* invert = app.add_subcommand("invert", "run the inversion cascade");
  auto* summarize = app.add_subcommand("summarize", "rebuild summary tables of a run");
  for (auto* sub : {generate, invert, summarize}) sub->fallthrough();
  for (const auto& key : cli::RunConfig::keys()) {
    app.add_option_function<std::string>(
        "--" + key, [&values, key](const std::string& v) { values[key] = v; },
        "override config key '" + key + "'");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitFailure;
  }

  try {
    const cli::RunConfig cfg = cli::load_config(config_file, values);
    if (generate->parsed()) return cli::cmd_generate(cfg, std::cout);
    if (invert->parsed()) return cli::cmd_invert(cfg, std::cout);
    return cli::cmd_summarize(cfg, std::cout);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
  }
  return cli::kExitFailure;
}
