#include "stirap/commands.hpp"

#include <cmath>
#include <filesystem>
#include <map>
#include <numbers>

#include "stirap/analysis.hpp"
#include "stirap/cpb.hpp"
#include "stirap/csv.hpp"
#include "stirap/dynamics.hpp"
#include "stirap/errors.hpp"

namespace stirap {
namespace fs = std::filesystem;

namespace {

fs::path prepare(const RunConfig& cfg) {
  cfg.validate();
  const fs::path dir = cfg.output.directory;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory " + dir.string());
  write_text_file(dir / "config.cfg", to_text(cfg));
  return dir;
}

MarkovRatesd rates_from(const RunConfig& cfg) {
  MarkovRatesd r;
  r.decay_10 = cfg.markov.gamma_10;
  r.decay_20 = cfg.markov.gamma_20;
  r.decay_21 = cfg.markov.gamma_21;
  r.dephasing_01 = cfg.markov.gamma_tilde_01;
  r.dephasing_02 = cfg.markov.gamma_tilde_02;
  r.dephasing_12 = cfg.markov.gamma_tilde_12;
  return r;
}

CpbModeld device_from(const RunConfig& cfg) { return {cfg.device.J, cfg.device.q_g, cfg.device.n_max}; }

GridAxis axis(double lo, double hi, int points) { return {lo, hi, points}; }

std::string line(const char* key, double v) { return std::string(key) + " = " + CsvWriter::format(v, 12); }

}  // namespace

PulseParamsd pulses_from(const RunConfig& cfg) {
  const auto& p = cfg.pulses;
  return PulseParamsd::symmetric(p.omega0T, p.tau_over_T, 1.0, p.kappa_p, p.kappa_s, p.tails);
}

double energy_scale_from(const RunConfig& cfg) {
  const double two_pi = 2 * std::numbers::pi;
  const double omega0 = calibrated_omega0(device_from(cfg), two_pi * cfg.device.rabi_ref_hz);
  // parity leakage of n_02 at q_g = 1/2 is ~1e-12, not an exact zero
  if (!(omega0 > 1e-9 * two_pi * cfg.device.rabi_ref_hz))
    throw DomainError("pump coupling n_02 vanishes at q_g = " + CsvWriter::format(cfg.device.q_g, 12) +
                      "; the drive cannot be calibrated");
  return two_pi * cfg.device.energy_unit_hz * cfg.pulses.omega0T / omega0;
}

void cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  const fs::path dir = prepare(cfg);
  ThreeLevelDrived drive{pulses_from(cfg), {}};
  drive.detunings.delta = cfg.detunings.delta * drive.pulses.omega0;
  drive.detunings.delta_p = cfg.detunings.delta_p * drive.pulses.omega0;
  const MarkovRatesd rates = rates_from(cfg);
  const std::vector<double> grid = time_grid(drive.pulses.t_start, drive.pulses.t_end, cfg.output.grid_points);
  PropagationOptionsd opts;
  opts.tol = cfg.output.tol;
  const StateVectord psi0 = bare_state<double>(0);
  const bool markov = rates.any();

  Trajectoryd tr;
  if (cfg.noise.sigma_x > 0) {
    SpaSpec spec;
    spec.sigma_x = cfg.noise.sigma_x;
    spec.method = cfg.noise.method == "monte-carlo" ? SpaMethod::MonteCarlo : SpaMethod::GaussHermite;
    spec.order = cfg.noise.order;
    spec.samples = cfg.noise.samples;
    spec.seed = cfg.noise.seed;
    spec.fluctuate = {cfg.noise.detuning_linear, cfg.noise.detuning_quadratic, cfg.noise.rabi_linear,
                      cfg.noise.rabi_quadratic};
    spec.energy_scale = energy_scale_from(cfg);
    spec.workers = cfg.workers;
    const CpbSpectrumd spectrum = cpb_spectrum(device_from(cfg), 3);
    SpaResult res = spa_average(drive, spectrum, spec, rates, psi0, grid, opts);
    tr = std::move(res.averaged);
    if (spec.method == SpaMethod::MonteCarlo) log << line("standard_error", res.standard_error) << '\n';
    log << "noise_nodes = " << res.evaluations << '\n';
  } else if (markov) {
    tr = propagate_lindblad(drive, rates, pure_density(psi0), grid, opts);
  } else {
    tr = propagate_unitary(drive, psi0, grid, opts);
  }

  std::vector<std::string> header{"t", "P0", "P1", "P2"};
  if (markov) header.push_back("trace");
  CsvWriter csv(dir / "trajectory.csv", header, cfg.output.precision);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    csv.cell(grid[k] * cfg.output.time_scale);
    for (int i = 0; i < 3; ++i) csv.cell(tr.populations[k](i));
    if (markov) csv.cell(tr.traces[k]);
    csv.end_row();
  }
  csv.close();

  CsvWriter eig(dir / "adiabatic.csv", {"t", "omega_p", "omega_s", "E0", "E1", "E2"}, cfg.output.precision);
  const auto track = adiabatic_track(grid, drive);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Envelopesd env = pulse_envelopes(grid[k], drive.pulses);
    eig.cell(grid[k] * cfg.output.time_scale)
        .cell(env.pump / drive.pulses.omega0)
        .cell(env.stokes / drive.pulses.omega0);
    for (int i = 0; i < 3; ++i) eig.cell(track[k].eigenvalues(i) / drive.pulses.omega0);
    eig.end_row();
  }
  eig.close();

  log << line("efficiency", tr.efficiency()) << '\n';
  log << line("max_P2", tr.max_population(2)) << '\n';
  if (!markov && cfg.noise.sigma_x == 0) log << line("norm_drift", std::abs(std::sqrt(tr.traces.back()) - 1)) << '\n';
  if (markov) log << line("min_eigenvalue", tr.min_eigenvalue) << '\n';
}

void cmd_diagram(const RunConfig& cfg, std::ostream& log) {
  const fs::path dir = prepare(cfg);
  const auto& s = cfg.sweep;
  DiagramSpec spec;
  spec.delta = axis(s.delta_min, s.delta_max, s.delta_points);
  spec.delta_p = axis(s.delta_p_min, s.delta_p_max, s.delta_p_points);
  spec.levels = s.levels;
  spec.tol = cfg.output.tol;
  spec.sweep.workers = cfg.workers;
  spec.sweep.checkpoint_every = std::size_t(s.checkpoint_every);
  spec.sweep.stop_after = std::size_t(s.stop_after);
  if (s.checkpoint) spec.sweep.checkpoint = dir / "efficiency_map.ckpt";

  const EfficiencyMap map = efficiency_diagram(pulses_from(cfg), spec);
  for (const std::string& f : map.failures) log << "failed cell " << f << '\n';
  if (!map.complete) {
    log << "partial sweep stopped; rerun the same command to resume from " << spec.sweep.checkpoint.string()
        << '\n';
    return;
  }

  CsvWriter csv(dir / "efficiency_map.csv", {"delta", "delta_p", "efficiency"}, cfg.output.precision);
  for (std::size_t ip = 0; ip < map.delta_p_axis.size(); ++ip)
    for (std::size_t id = 0; id < map.delta_axis.size(); ++id)
      csv.cell(map.delta_axis[id]).cell(map.delta_p_axis[ip]).cell(map.values(ip, id)).end_row();
  csv.close();

  CsvWriter con(dir / "contours.csv", {"level", "contour", "index", "delta", "delta_p", "closed"},
                cfg.output.precision);
  for (std::size_t c = 0; c < map.contours.size(); ++c) {
    const Polyline& pl = map.contours[c];
    for (std::size_t k = 0; k < pl.points.size(); ++k)
      con.cell(pl.level)
          .cell((long long)c)
          .cell((long long)k)
          .cell(pl.points[k].x())
          .cell(pl.points[k].y())
          .cell((long long)pl.closed)
          .end_row();
  }
  con.close();

  log << "cells = " << map.values.size() << ", failed = " << map.failures.size() << '\n';
  for (double level : s.levels)
    log << "level " << CsvWriter::format(level, 12)
        << ": extent along delta = " << CsvWriter::format(region_extent_along_delta(map, level), 12)
        << ", along delta_p = " << CsvWriter::format(region_extent_along_delta_p(map, level), 12) << '\n';
}

void cmd_cpb(const RunConfig& cfg, std::ostream& log) {
  const fs::path dir = prepare(cfg);
  const auto& s = cfg.sweep;
  const std::vector<double> js = axis(s.J_min, s.J_max, s.J_points).values();
  const std::vector<double> qs = axis(s.q_g_min, s.q_g_max, s.q_g_points).values();
  std::vector<CpbSpectrumd> spectra(js.size() * qs.size());
  parallel_for(spectra.size(), cfg.workers, [&](std::size_t c) {
    spectra[c] = cpb_spectrum(CpbModeld{js[c / qs.size()], qs[c % qs.size()], cfg.device.n_max}, 3);
  });

  CsvWriter csv(dir / "spectrum.csv", {"q_g", "J", "E1", "E2", "n01", "n02", "n12", "A1", "A2", "B1", "B2"},
                cfg.output.precision);
  for (const CpbSpectrumd& sp : spectra) {
    csv.cell(sp.model.q_g).cell(sp.model.J).cell(sp.energies(1)).cell(sp.energies(2));
    csv.cell(sp.n(0, 1)).cell(sp.n(0, 2)).cell(sp.n(1, 2));
    csv.cell(sp.slope(1)).cell(sp.slope(2)).cell(sp.curvature(1)).cell(sp.curvature(2));
    csv.end_row();
  }
  csv.close();
  log << "rows = " << spectra.size() << '\n';
}

void cmd_fom(const RunConfig& cfg, std::ostream& log) {
  const fs::path dir = prepare(cfg);
  if (!(cfg.noise.sigma_x > 0)) throw ConfigError("fom needs noise.sigma_x > 0");
  const auto& s = cfg.sweep;
  const MeritMap m = merit_map(axis(s.J_min, s.J_max, s.J_points), axis(s.q_g_min, s.q_g_max, s.q_g_points),
                               cfg.noise.sigma_x, cfg.device.n_max, cfg.workers);
  CsvWriter csv(dir / "merit_map.csv", {"J", "q_g", "n02", "A1", "B1", "sigma_delta", "merit"},
                cfg.output.precision);
  const MeritRow* best = nullptr;
  for (const MeritRow& r : m.rows) {
    csv.cell(r.J).cell(r.q_g).cell(r.n02).cell(r.a1).cell(r.b1).cell(r.sigma_delta).cell(r.merit).end_row();
    if (std::isfinite(r.merit) && (!best || r.merit > best->merit)) best = &r;
  }
  csv.close();
  if (best)
    log << "max merit = " << CsvWriter::format(best->merit, 12) << " at J = " << CsvWriter::format(best->J, 12)
        << ", q_g = " << CsvWriter::format(best->q_g, 12) << '\n';
}

void cmd_dephasing(const RunConfig& cfg, std::ostream& log) {
  const fs::path dir = prepare(cfg);
  DephasingSpec spec;
  spec.t2 = cfg.sweep.T2;
  spec.tau_over_T = cfg.pulses.tau_over_T;
  spec.kappa_p = cfg.pulses.kappa_p;
  spec.kappa_s = cfg.pulses.kappa_s;
  spec.a1 = cfg.sweep.A1;
  spec.a2 = cfg.sweep.A2;
  spec.order = cfg.noise.order;
  spec.tol = cfg.output.tol;
  spec.workers = cfg.workers;
  const auto rows = dephasing_scan(cfg.sweep.omega0T_list, spec);

  CsvWriter csv(dir / "dephasing_scan.csv", {"omega0T", "mode", "P0", "P1", "P2"}, cfg.output.precision);
  for (const DephasingRow& r : rows) {
    csv.cell(r.omega0T).cell(std::string(to_string(r.mode)));
    for (int i = 0; i < 3; ++i) csv.cell(r.populations(i));
    csv.end_row();
  }
  csv.close();
  const FinalPopulations ref = markovian_final_populations(1.0 / spec.t2, 1.0, spec.tau_over_T);
  log << line("closed_form_rho11", ref.rho11) << '\n' << line("closed_form_rho00", ref.rho00) << '\n';
}

void cmd_linewidth(const RunConfig& cfg, std::ostream& log) {
  const fs::path dir = prepare(cfg);
  const PulseParamsd pulses = pulses_from(cfg);
  LinewidthOptions opts;
  opts.level = cfg.sweep.level;
  opts.tol = cfg.output.tol;
  std::vector<Linewidth> widths(cfg.sweep.slopes.size());
  parallel_for(widths.size(), cfg.workers,
               [&](std::size_t k) { widths[k] = two_photon_linewidth(pulses, cfg.sweep.slopes[k], opts); });

  CsvWriter csv(dir / "linewidth.csv",
                {"slope", "pattern", "kappa_p", "kappa_s", "level", "delta_half", "positive", "negative"},
                cfg.output.precision);
  for (std::size_t k = 0; k < widths.size(); ++k) {
    const double a = cfg.sweep.slopes[k];
    const Linewidth& w = widths[k];
    csv.cell(a).cell(std::string(1, to_char(lz_classify(1.0, a))));
    csv.cell(pulses.kappa_p).cell(pulses.kappa_s).cell(opts.level);
    csv.cell(w.delta_half / pulses.omega0).cell(w.positive / pulses.omega0).cell(w.negative / pulses.omega0);
    csv.end_row();
    log << "slope " << CsvWriter::format(a, 12) << ": delta_half = "
        << CsvWriter::format(w.delta_half / pulses.omega0, 12) << " omega0\n";
  }
  csv.close();
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"simulate", "diagram", "cpb", "fom", "dephasing", "linewidth"};
  return names;
}

void run_command(const std::string& name, const RunConfig& cfg, std::ostream& log) {
  static const std::map<std::string, void (*)(const RunConfig&, std::ostream&)> table{
      {"simulate", cmd_simulate}, {"diagram", cmd_diagram},     {"cpb", cmd_cpb},
      {"fom", cmd_fom},           {"dephasing", cmd_dephasing}, {"linewidth", cmd_linewidth}};
  const auto it = table.find(name);
  if (it == table.end()) throw ConfigError("unknown command '" + name + "'");
  it->second(cfg, log);
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  return 3;
}

}  // namespace stirap
