#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "stirap/commands.hpp"
#include "stirap/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"STIRAP in driven three-level systems under colored and Markovian noise"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  int workers = 1;
  std::optional<std::uint64_t> seed;
  std::optional<double> level;

  const std::map<std::string, std::string> help{
      {"simulate", "population histories of one protocol run (trajectory.csv)"},
      {"diagram", "transfer efficiency over (delta, delta_p) with iso-efficiency contours"},
      {"cpb", "Cooper pair box spectrum, matrix elements and charge sensitivities"},
      {"fom", "charge-noise figure of merit over (J, q_g)"},
      {"dephasing", "Markovian vs static-noise final populations vs Omega0*T"},
      {"linewidth", "two-photon linewidth along delta_p = slope * delta"}};
  for (const std::string& name : stirap::command_names()) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", config_path, "INI config file (defaults apply when omitted)");
    sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Monte Carlo seed (overrides noise.seed)");
    sub->add_option("--level", level, "linewidth threshold (overrides sweep.level)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    stirap::RunConfig cfg = config_path.empty() ? stirap::RunConfig{} : stirap::load_config(config_path);
    if (out_dir) cfg.output.directory = *out_dir;
    if (seed) cfg.noise.seed = *seed;
    if (level) cfg.sweep.level = *level;
    cfg.workers = workers;
    stirap::run_command(command, cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "stirap " << command << ": " << e.what() << '\n';
    return stirap::exit_code_for(e);
  }
  return 0;
}
