#include "disscat/errors.hpp"
#include "disscat/parallel.hpp"
#include "disscat/run.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Stationary and time-dependent scattering for dissipative systems"};
  app.set_version_flag("--version", disscat::kVersion);
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int threads = 0;
  for (const std::string& name : disscat::command_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
    sub->add_option("--threads", threads, "worker threads, default: all cores")->check(CLI::NonNegativeNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : disscat::kExitInvalid;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  disscat::RunConfig cfg;
  try {
    cfg = disscat::load_config(config_path);
  } catch (const disscat::Error& e) {
    std::cerr << "disscat " << command << ": " << e.what() << '\n';
    return disscat::kExitInvalid;
  }
  if (!cfg.command.empty() && cfg.command != command) {
    std::cerr << "disscat " << command << ": config is for command '" << cfg.command << "'\n";
    return disscat::kExitInvalid;
  }
  cfg.command = command;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  disscat::set_threads(threads);
  return disscat::run(cfg, std::cerr);
}
