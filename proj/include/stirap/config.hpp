#ifndef STIRAP_CONFIG_HPP
#define STIRAP_CONFIG_HPP

// Run configuration: flat INI sections of `key = value` lines with `#`
// comments. Times are in units of the pulse width T, detunings in units of
// Omega0, CPB energies in charging units.

#include <cstdint>
#include <string>
#include <vector>

namespace stirap {

struct RunConfig {
  struct Pulses {
    double omega0T = 20;
    double tau_over_T = 0.6;
    double kappa_p = 1;
    double kappa_s = 1;
    double tails = 4;
    bool operator==(const Pulses&) const = default;
  } pulses;

  struct Detunings {
    double delta = 0;
    double delta_p = 0;
    bool operator==(const Detunings&) const = default;
  } detunings;

  struct Device {
    double J = 1;
    double q_g = 0.48;
    int n_max = 10;
    double rabi_ref_hz = 600e6;
    double energy_unit_hz = 14.2e9;
    bool operator==(const Device&) const = default;
  } device;

  struct Noise {
    double sigma_x = 0;
    std::string method = "gauss-hermite";
    int order = 21;
    int samples = 10000;
    std::uint64_t seed = 1;
    bool detuning_linear = true;
    bool detuning_quadratic = false;
    bool rabi_linear = false;
    bool rabi_quadratic = false;
    bool operator==(const Noise&) const = default;
  } noise;

  struct Markov {
    double gamma_10 = 0;
    double gamma_20 = 0;
    double gamma_21 = 0;
    double gamma_tilde_01 = 0;
    double gamma_tilde_02 = 0;
    double gamma_tilde_12 = 0;
    bool operator==(const Markov&) const = default;
  } markov;

  struct Sweep {
    double delta_min = -1;
    double delta_max = 1;
    int delta_points = 81;
    double delta_p_min = -1;
    double delta_p_max = 1;
    int delta_p_points = 81;
    std::vector<double> levels{0.9};
    double J_min = 0.5;
    double J_max = 2;
    int J_points = 16;
    double q_g_min = 0.40;
    double q_g_max = 0.49;
    int q_g_points = 10;
    std::vector<double> omega0T_list{1, 2, 3, 5, 10, 20, 30, 50, 100, 200};
    double T2 = 1;
    double A1 = 1;
    double A2 = 0;
    std::vector<double> slopes{0};
    double level = 0.5;
    bool checkpoint = true;
    int checkpoint_every = 256;
    int stop_after = 0;
    bool operator==(const Sweep&) const = default;
  } sweep;

  struct Output {
    std::string directory = "out";
    int precision = 12;
    int grid_points = 2000;
    double tol = 1e-9;
    double time_scale = 1;
    bool operator==(const Output&) const = default;
  } output;

  int workers = 1;  // command line only, never echoed

  bool operator==(const RunConfig& o) const {
    return pulses == o.pulses && detunings == o.detunings && device == o.device && noise == o.noise &&
           markov == o.markov && sweep == o.sweep && output == o.output;
  }

  /// Range and consistency checks shared by every command; throws ConfigError.
  void validate() const;
};

/// Parses INI text on top of the defaults. Unknown sections or keys,
/// duplicate keys and malformed values throw ConfigError naming the key and
/// line. `origin` prefixes error messages.
RunConfig parse_config(const std::string& text, const std::string& origin = "config");
RunConfig load_config(const std::string& path);

/// Canonical text of every key; parse_config(to_text(c)) == c.
std::string to_text(const RunConfig& c);

}  // namespace stirap

#endif  // STIRAP_CONFIG_HPP
