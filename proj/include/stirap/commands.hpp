#ifndef STIRAP_COMMANDS_HPP
#define STIRAP_COMMANDS_HPP

// Batch commands behind the CLI. Each writes its CSV tables plus the
// resolved config (config.cfg) into cfg.output.directory and reports a short
// summary on `log`. Errors surface as ConfigError (bad input) or
// NumericError/DomainError (solver or domain failure).

#include <ostream>
#include <string>
#include <vector>

#include "stirap/config.hpp"
#include "stirap/model3.hpp"
#include "stirap/noise.hpp"

namespace stirap {

void cmd_simulate(const RunConfig& cfg, std::ostream& log);
void cmd_diagram(const RunConfig& cfg, std::ostream& log);
void cmd_cpb(const RunConfig& cfg, std::ostream& log);
void cmd_fom(const RunConfig& cfg, std::ostream& log);
void cmd_dephasing(const RunConfig& cfg, std::ostream& log);
void cmd_linewidth(const RunConfig& cfg, std::ostream& log);

const std::vector<std::string>& command_names();
void run_command(const std::string& name, const RunConfig& cfg, std::ostream& log);

/// 0 success, 2 configuration error, 3 numeric failure.
int exit_code_for(const std::exception& e);

PulseParamsd pulses_from(const RunConfig& cfg);

/// Converts CPB energies (charging units) into detunings in units of 1/T:
/// the drive is calibrated so Omega0 = 2 pi rabi_ref n_02(q_g)/n_01(1/2) in
/// lab units, which fixes T = omega0T / Omega0.
double energy_scale_from(const RunConfig& cfg);

}  // namespace stirap

#endif  // STIRAP_COMMANDS_HPP
