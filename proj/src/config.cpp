#include "stirap/config.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <variant>

#include "stirap/errors.hpp"

namespace stirap {
namespace {

using FieldRef = std::variant<double*, int*, std::uint64_t*, bool*, std::string*, std::vector<double>*>;

struct Field {
  const char* section;
  const char* key;
  FieldRef ref;
};

std::vector<Field> fields(RunConfig& c) {
  auto& p = c.pulses;
  auto& d = c.detunings;
  auto& v = c.device;
  auto& n = c.noise;
  auto& m = c.markov;
  auto& s = c.sweep;
  auto& o = c.output;
  return {
      {"pulses", "omega0T", &p.omega0T},
      {"pulses", "tau_over_T", &p.tau_over_T},
      {"pulses", "kappa_p", &p.kappa_p},
      {"pulses", "kappa_s", &p.kappa_s},
      {"pulses", "tails", &p.tails},
      {"detunings", "delta", &d.delta},
      {"detunings", "delta_p", &d.delta_p},
      {"device", "J", &v.J},
      {"device", "q_g", &v.q_g},
      {"device", "n_max", &v.n_max},
      {"device", "rabi_ref_hz", &v.rabi_ref_hz},
      {"device", "energy_unit_hz", &v.energy_unit_hz},
      {"noise", "sigma_x", &n.sigma_x},
      {"noise", "method", &n.method},
      {"noise", "order", &n.order},
      {"noise", "samples", &n.samples},
      {"noise", "seed", &n.seed},
      {"noise", "fluctuate.detuning_linear", &n.detuning_linear},
      {"noise", "fluctuate.detuning_quadratic", &n.detuning_quadratic},
      {"noise", "fluctuate.rabi_linear", &n.rabi_linear},
      {"noise", "fluctuate.rabi_quadratic", &n.rabi_quadratic},
      {"markov", "gamma_10", &m.gamma_10},
      {"markov", "gamma_20", &m.gamma_20},
      {"markov", "gamma_21", &m.gamma_21},
      {"markov", "gamma_tilde_01", &m.gamma_tilde_01},
      {"markov", "gamma_tilde_02", &m.gamma_tilde_02},
      {"markov", "gamma_tilde_12", &m.gamma_tilde_12},
      {"sweep", "delta_min", &s.delta_min},
      {"sweep", "delta_max", &s.delta_max},
      {"sweep", "delta_points", &s.delta_points},
      {"sweep", "delta_p_min", &s.delta_p_min},
      {"sweep", "delta_p_max", &s.delta_p_max},
      {"sweep", "delta_p_points", &s.delta_p_points},
      {"sweep", "levels", &s.levels},
      {"sweep", "J_min", &s.J_min},
      {"sweep", "J_max", &s.J_max},
      {"sweep", "J_points", &s.J_points},
      {"sweep", "q_g_min", &s.q_g_min},
      {"sweep", "q_g_max", &s.q_g_max},
      {"sweep", "q_g_points", &s.q_g_points},
      {"sweep", "omega0T_list", &s.omega0T_list},
      {"sweep", "T2", &s.T2},
      {"sweep", "A1", &s.A1},
      {"sweep", "A2", &s.A2},
      {"sweep", "slopes", &s.slopes},
      {"sweep", "level", &s.level},
      {"sweep", "checkpoint", &s.checkpoint},
      {"sweep", "checkpoint_every", &s.checkpoint_every},
      {"sweep", "stop_after", &s.stop_after},
      {"output", "directory", &o.directory},
      {"output", "precision", &o.precision},
      {"output", "grid_points", &o.grid_points},
      {"output", "tol", &o.tol},
      {"output", "time_scale", &o.time_scale},
  };
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double to_double(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty value");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (*end != '\0' || errno == ERANGE || !std::isfinite(v)) throw std::invalid_argument("not a finite number");
  return v;
}

void assign(FieldRef ref, const std::string& text) {
  std::visit(
      [&](auto* target) {
        using T = std::remove_pointer_t<decltype(target)>;
        if constexpr (std::is_same_v<T, double>) {
          *target = to_double(text);
        } else if constexpr (std::is_same_v<T, int>) {
          const double v = to_double(text);
          if (v != std::floor(v) || std::abs(v) > 2e9) throw std::invalid_argument("not an integer");
          *target = int(v);
        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
          if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument("not an unsigned 64-bit integer");
          errno = 0;
          const unsigned long long v = std::strtoull(text.c_str(), nullptr, 10);
          if (errno == ERANGE) throw std::invalid_argument("out of range");
          *target = v;
        } else if constexpr (std::is_same_v<T, bool>) {
          if (text == "true") *target = true;
          else if (text == "false") *target = false;
          else throw std::invalid_argument("expected true or false");
        } else if constexpr (std::is_same_v<T, std::string>) {
          *target = text;
        } else {
          target->clear();
          std::stringstream ss(text);
          std::string item;
          while (std::getline(ss, item, ',')) target->push_back(to_double(trim(item)));
          if (target->empty()) throw std::invalid_argument("empty list");
        }
      },
      ref);
}

std::string render(FieldRef ref) {
  return std::visit(
      [](auto* target) -> std::string {
        using T = std::remove_pointer_t<decltype(target)>;
        if constexpr (std::is_same_v<T, double>) {
          return fmt(*target);
        } else if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::uint64_t>) {
          return std::to_string(*target);
        } else if constexpr (std::is_same_v<T, bool>) {
          return *target ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return *target;
        } else {
          std::string out;
          for (std::size_t i = 0; i < target->size(); ++i) out += (i ? ", " : "") + fmt((*target)[i]);
          return out;
        }
      },
      ref);
}

void check_axis(std::ostringstream& why, const char* name, double lo, double hi, int points) {
  if (points < 1) why << "sweep." << name << "_points must be >= 1; ";
  else if (points > 1 && !(lo < hi)) why << "sweep." << name << "_min must be < " << name << "_max; ";
  else if (points == 1 && lo != hi) why << "sweep." << name << "_min must equal " << name << "_max for 1 point; ";
}

}  // namespace

void RunConfig::validate() const {
  std::ostringstream why;
  if (!(pulses.omega0T > 0)) why << "pulses.omega0T must be > 0; ";
  if (!(pulses.tau_over_T >= 0)) why << "pulses.tau_over_T must be >= 0; ";
  if (!(pulses.kappa_p >= 0) || !(pulses.kappa_s >= 0)) why << "pulses.kappa_p, kappa_s must be >= 0; ";
  if (!(pulses.tails > 0)) why << "pulses.tails must be > 0; ";
  if (!(device.J >= 0)) why << "device.J must be >= 0; ";
  if (device.n_max < 3) why << "device.n_max must be >= 3; ";
  if (!(device.rabi_ref_hz > 0) || !(device.energy_unit_hz > 0))
    why << "device.rabi_ref_hz and energy_unit_hz must be > 0; ";
  if (!(noise.sigma_x >= 0)) why << "noise.sigma_x must be >= 0; ";
  if (noise.method != "gauss-hermite" && noise.method != "monte-carlo")
    why << "noise.method must be gauss-hermite or monte-carlo; ";
  if (noise.order < 3 || noise.order % 2 == 0) why << "noise.order must be odd and >= 3; ";
  if (noise.samples < 1) why << "noise.samples must be >= 1; ";
  if (noise.detuning_quadratic && !noise.detuning_linear)
    why << "noise.fluctuate.detuning_quadratic requires detuning_linear; ";
  if (noise.rabi_quadratic && !noise.rabi_linear) why << "noise.fluctuate.rabi_quadratic requires rabi_linear; ";
  for (double r : {markov.gamma_10, markov.gamma_20, markov.gamma_21, markov.gamma_tilde_01,
                   markov.gamma_tilde_02, markov.gamma_tilde_12})
    if (!(r >= 0)) {
      why << "markov rates must be >= 0; ";
      break;
    }
  check_axis(why, "delta", sweep.delta_min, sweep.delta_max, sweep.delta_points);
  check_axis(why, "delta_p", sweep.delta_p_min, sweep.delta_p_max, sweep.delta_p_points);
  check_axis(why, "J", sweep.J_min, sweep.J_max, sweep.J_points);
  check_axis(why, "q_g", sweep.q_g_min, sweep.q_g_max, sweep.q_g_points);
  for (double l : sweep.levels)
    if (!(l > 0 && l < 1)) {
      why << "sweep.levels must lie in (0, 1); ";
      break;
    }
  for (double w : sweep.omega0T_list)
    if (!(w > 0)) {
      why << "sweep.omega0T_list entries must be > 0; ";
      break;
    }
  if (!(sweep.T2 > 0)) why << "sweep.T2 must be > 0; ";
  if (sweep.A1 == 0) why << "sweep.A1 must be nonzero; ";
  if (!(sweep.level > 0 && sweep.level < 1)) why << "sweep.level must lie in (0, 1); ";
  if (sweep.checkpoint_every < 1) why << "sweep.checkpoint_every must be >= 1; ";
  if (sweep.stop_after < 0) why << "sweep.stop_after must be >= 0; ";
  if (output.directory.empty()) why << "output.directory must not be empty; ";
  if (output.precision < 1 || output.precision > 17) why << "output.precision must be in [1, 17]; ";
  if (output.grid_points < 2) why << "output.grid_points must be >= 2; ";
  if (!(output.tol >= 1e-12 && output.tol <= 1e-4)) why << "output.tol must be in [1e-12, 1e-4]; ";
  if (!(output.time_scale > 0)) why << "output.time_scale must be > 0; ";
  if (workers < 1) why << "workers must be >= 1; ";
  if (!why.str().empty()) throw ConfigError(why.str().substr(0, why.str().size() - 2));
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  RunConfig c;
  std::map<std::string, FieldRef> lookup;
  std::set<std::string> sections;
  for (const Field& f : fields(c)) {
    lookup.emplace(std::string(f.section) + "." + f.key, f.ref);
    sections.insert(f.section);
  }

  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno) + ": ";
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (!sections.count(section)) throw ConfigError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(where + "key '" + key + "' outside any section");
    const std::string full = section + "." + key;
    const auto it = lookup.find(full);
    if (it == lookup.end()) throw ConfigError(where + "unknown key '" + key + "' in [" + section + "]");
    if (!seen.insert(full).second) throw ConfigError(where + "duplicate key '" + full + "'");
    try {
      assign(it->second, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + "bad value for '" + full + "': " + e.what() + " ('" + value + "')");
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string to_text(const RunConfig& c) {
  RunConfig copy = c;
  std::ostringstream os;
  std::string section;
  for (const Field& f : fields(copy)) {
    if (section != f.section) {
      if (!section.empty()) os << '\n';
      section = f.section;
      os << '[' << section << "]\n";
    }
    os << f.key << " = " << render(f.ref) << '\n';
  }
  return os.str();
}

}  // namespace stirap
