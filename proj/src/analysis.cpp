#include "stirap/analysis.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "stirap/errors.hpp"

namespace stirap {

std::vector<double> GridAxis::values() const {
  validate("axis");
  if (points == 1) return {min};
  std::vector<double> v(points);
  for (int k = 0; k < points; ++k) v[k] = min + (max - min) * double(k) / double(points - 1);
  v.back() = max;
  return v;
}

void GridAxis::validate(const char* name) const {
  std::ostringstream why;
  if (points < 1) why << name << ": grid must have at least one point";
  else if (!std::isfinite(min) || !std::isfinite(max)) why << name << ": bounds must be finite";
  else if (points > 1 && !(max > min)) why << name << ": max must exceed min";
  if (!why.str().empty()) throw ConfigError(why.str());
}

// --- contours ---------------------------------------------------------------

std::vector<Polyline> marching_squares(const std::vector<double>& x, const std::vector<double>& y,
                                       const Eigen::MatrixXd& values, double level) {
  const int nx = static_cast<int>(x.size());
  const int ny = static_cast<int>(y.size());
  if (values.rows() != ny || values.cols() != nx)
    throw ConfigError("marching_squares: value grid does not match axes");
  if (nx < 2 || ny < 2) return {};

  // Edge ids: 2*(iy*nx + ix) for the horizontal edge starting at (ix, iy),
  // +1 for the vertical edge starting there.
  auto h_edge = [&](int ix, int iy) { return 2L * (long(iy) * nx + ix); };
  auto v_edge = [&](int ix, int iy) { return 2L * (long(iy) * nx + ix) + 1; };
  std::map<long, Eigen::Vector2d> crossing;
  auto interp = [&](int ix0, int iy0, int ix1, int iy1) {
    const double a = values(iy0, ix0), b = values(iy1, ix1);
    const double s = (level - a) / (b - a);
    return Eigen::Vector2d(x[ix0] + s * (x[ix1] - x[ix0]), y[iy0] + s * (y[iy1] - y[iy0]));
  };

  std::map<long, std::vector<long>> links;
  auto add_segment = [&](long e0, long e1) {
    links[e0].push_back(e1);
    links[e1].push_back(e0);
  };

  for (int iy = 0; iy + 1 < ny; ++iy) {
    for (int ix = 0; ix + 1 < nx; ++ix) {
      const double v00 = values(iy, ix), v10 = values(iy, ix + 1);
      const double v11 = values(iy + 1, ix + 1), v01 = values(iy + 1, ix);
      if (!std::isfinite(v00) || !std::isfinite(v10) || !std::isfinite(v11) || !std::isfinite(v01)) continue;
      const bool s00 = v00 >= level, s10 = v10 >= level, s11 = v11 >= level, s01 = v01 >= level;
      const long bottom = h_edge(ix, iy), top = h_edge(ix, iy + 1);
      const long left = v_edge(ix, iy), right = v_edge(ix + 1, iy);
      std::vector<long> cut;
      if (s00 != s10) { crossing.emplace(bottom, interp(ix, iy, ix + 1, iy)); cut.push_back(bottom); }
      if (s10 != s11) { crossing.emplace(right, interp(ix + 1, iy, ix + 1, iy + 1)); cut.push_back(right); }
      if (s11 != s01) { crossing.emplace(top, interp(ix, iy + 1, ix + 1, iy + 1)); cut.push_back(top); }
      if (s01 != s00) { crossing.emplace(left, interp(ix, iy, ix, iy + 1)); cut.push_back(left); }
      if (cut.size() == 2) {
        add_segment(cut[0], cut[1]);
      } else if (cut.size() == 4) {
        // Saddle: cut off the corners whose side differs from the cell centre.
        const bool centre = 0.25 * (v00 + v10 + v11 + v01) >= level;
        if (s00 != centre) add_segment(left, bottom);
        if (s10 != centre) add_segment(bottom, right);
        if (s11 != centre) add_segment(right, top);
        if (s01 != centre) add_segment(top, left);
      }
    }
  }

  std::vector<Polyline> out;
  std::map<long, bool> used_link;  // keyed by min/max pair encoded
  auto link_key = [&](long a, long b) { return std::min(a, b) * 4 * long(nx) * long(ny) + std::max(a, b); };
  auto walk = [&](long start) {
    Polyline line;
    line.level = level;
    long cur = start;
    line.points.push_back(crossing.at(cur));
    while (true) {
      long next = -1;
      for (long cand : links.at(cur)) {
        if (used_link[link_key(cur, cand)]) continue;
        next = cand;
        break;
      }
      if (next < 0) break;
      used_link[link_key(cur, next)] = true;
      cur = next;
      line.points.push_back(crossing.at(cur));
      if (cur == start) {
        line.closed = true;
        break;
      }
    }
    return line;
  };
  // Open chains start at edges with a single link (grid boundary).
  for (const auto& [edge, nb] : links) {
    if (nb.size() != 1) continue;
    if (used_link[link_key(edge, nb[0])]) continue;
    out.push_back(walk(edge));
  }
  for (const auto& [edge, nb] : links) {
    for (long other : nb) {
      if (used_link[link_key(edge, other)]) continue;
      out.push_back(walk(edge));
    }
  }
  return out;
}

// --- efficiency diagram -----------------------------------------------------

EfficiencyMap efficiency_diagram(const PulseParamsd& pulses, const DiagramSpec& spec) {
  pulses.validate();
  spec.delta.validate("delta axis");
  spec.delta_p.validate("delta_p axis");
  for (double level : spec.levels)
    if (!(level > 0 && level < 1)) throw ConfigError("efficiency_diagram: contour levels must be in (0, 1)");

  EfficiencyMap map;
  map.delta_axis = spec.delta.values();
  map.delta_p_axis = spec.delta_p.values();
  const std::size_t nd = map.delta_axis.size(), np = map.delta_p_axis.size();
  const std::vector<double> grid = time_grid(pulses.t_start, pulses.t_end, 2);
  PropagationOptionsd opts;
  opts.tol = spec.tol;

  const CellTask task = [&](std::size_t cell) -> std::vector<double> {
    ThreeLevelDrived d{pulses, {}};
    d.detunings.delta = map.delta_axis[cell % nd] * pulses.omega0;
    d.detunings.delta_p = map.delta_p_axis[cell / nd] * pulses.omega0;
    return {propagate_unitary(d, bare_state<double>(0), grid, opts).efficiency()};
  };
  const SweepOutcome run = run_sweep(nd * np, task, spec.sweep);

  map.complete = run.complete;
  map.values = Eigen::MatrixXd::Constant(np, nd, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t c = 0; c < run.cells.size(); ++c) {
    const CellResult& r = run.cells[c];
    if (r.ok()) {
      map.values(c / nd, c % nd) = r.values.at(0);
    } else if (r.done) {
      std::ostringstream os;
      os << c % nd << ',' << c / nd << ": " << r.error;
      map.failures.push_back(os.str());
    }
  }
  if (map.complete)
    for (double level : spec.levels) {
      auto lines = marching_squares(map.delta_axis, map.delta_p_axis, map.values, level);
      map.contours.insert(map.contours.end(), lines.begin(), lines.end());
    }
  return map;
}

namespace {

// Values along the line through the origin parallel to one axis, linearly
// interpolated across the other axis when 0 is not a grid node.
std::vector<double> line_through_origin(const EfficiencyMap& map, bool along_delta) {
  const std::vector<double>& across = along_delta ? map.delta_p_axis : map.delta_axis;
  std::size_t hi = 0;
  while (hi < across.size() && across[hi] < 0) ++hi;
  if (hi == across.size() || (hi == 0 && across[0] > 0))
    throw DomainError("region extent: the map does not contain the origin");
  auto at = [&](std::size_t k, std::size_t j) { return along_delta ? map.values(k, j) : map.values(j, k); };
  const std::size_t n = along_delta ? map.delta_axis.size() : map.delta_p_axis.size();
  std::vector<double> line(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (across[hi] == 0 || hi == 0) {
      line[j] = at(hi, j);
    } else {
      const double s = (0 - across[hi - 1]) / (across[hi] - across[hi - 1]);
      line[j] = (1 - s) * at(hi - 1, j) + s * at(hi, j);
    }
  }
  return line;
}

double extent(const std::vector<double>& axis, const std::vector<double>& line, double level) {
  // Value at 0 by interpolation along the line.
  std::size_t hi = 0;
  while (hi < axis.size() && axis[hi] < 0) ++hi;
  if (hi == axis.size() || (hi == 0 && axis[0] > 0))
    throw DomainError("region extent: the map does not contain the origin");
  double centre = line[hi];
  if (axis[hi] != 0 && hi > 0) {
    const double s = (0 - axis[hi - 1]) / (axis[hi] - axis[hi - 1]);
    centre = (1 - s) * line[hi - 1] + s * line[hi];
  }
  if (!(centre >= level)) return 0;

  auto reach = [&](int dir) {
    double x_prev = 0, v_prev = centre;
    long k = axis[hi] == 0 ? long(hi) + dir : (dir > 0 ? long(hi) : long(hi) - 1);
    for (; k >= 0 && k < long(axis.size()); k += dir) {
      const double v = line[k];
      if (!(v >= level)) {
        const double s = (v_prev - level) / (v_prev - v);
        return std::abs(x_prev + s * (axis[k] - x_prev));
      }
      x_prev = axis[k];
      v_prev = v;
    }
    return std::abs(x_prev);
  };
  return reach(+1) + reach(-1);
}

}  // namespace

double region_extent_along_delta(const EfficiencyMap& map, double level) {
  return extent(map.delta_axis, line_through_origin(map, true), level);
}

double region_extent_along_delta_p(const EfficiencyMap& map, double level) {
  return extent(map.delta_p_axis, line_through_origin(map, false), level);
}

// --- Landau-Zener patterns ---------------------------------------------------

LzPattern lz_classify(double delta, double delta_p) {
  if (delta == 0) throw DomainError("lz_classify: delta = 0 (two-photon resonance has no LZ pattern)");
  const double ratio = delta_p / delta;
  if (ratio < 0) return LzPattern::B;
  if (ratio < 1) return LzPattern::C;
  return LzPattern::A;
}

char to_char(LzPattern p) {
  switch (p) {
    case LzPattern::A: return 'a';
    case LzPattern::B: return 'b';
    case LzPattern::C: return 'c';
  }
  return '?';
}

// --- linewidth ---------------------------------------------------------------

Linewidth two_photon_linewidth(const PulseParamsd& pulses, double slope, const LinewidthOptions& opts) {
  pulses.validate();
  if (!(opts.level > 0 && opts.level < 1)) throw ConfigError("two_photon_linewidth: level must be in (0, 1)");
  if (!(opts.resolution > 0) || !(opts.scan_step > 0) || !(opts.max_extent > 0))
    throw ConfigError("two_photon_linewidth: resolution, scan_step and max_extent must be > 0");
  const std::vector<double> grid = time_grid(pulses.t_start, pulses.t_end, 2);
  PropagationOptionsd po;
  po.tol = opts.tol;
  auto efficiency = [&](double delta_in_omega0) {
    ThreeLevelDrived d{pulses, {}};
    d.detunings.delta = delta_in_omega0 * pulses.omega0;
    d.detunings.delta_p = slope * d.detunings.delta;
    return propagate_unitary(d, bare_state<double>(0), grid, po).efficiency();
  };
  if (!(efficiency(0.0) > opts.level))
    throw DomainError("two_photon_linewidth: on-resonance efficiency does not exceed the level");

  auto crossing = [&](double dir) {
    double lo = 0;
    for (double x = opts.scan_step; x <= opts.max_extent + 1e-12; x += opts.scan_step) {
      if (efficiency(dir * x) < opts.level) {
        double hi = x;
        while (hi - lo > opts.resolution) {
          const double mid = 0.5 * (lo + hi);
          (efficiency(dir * mid) < opts.level ? hi : lo) = mid;
        }
        return 0.5 * (lo + hi);
      }
      lo = x;
    }
    std::ostringstream os;
    os << "two_photon_linewidth: no crossing of level " << opts.level << " within |delta| <= "
       << opts.max_extent << " omega0 (slope " << slope << ")";
    throw DomainError(os.str());
  };
  Linewidth w;
  w.positive = crossing(+1) * pulses.omega0;
  w.negative = crossing(-1) * pulses.omega0;
  w.delta_half = 0.5 * (w.positive + w.negative);
  return w;
}

// --- figure of merit ---------------------------------------------------------

double sigma_delta(double sigma_x, double a1, double b1) {
  if (!(sigma_x >= 0)) throw ConfigError("sigma_delta: sigma_x must be >= 0");
  const double s2 = sigma_x * sigma_x;
  return std::sqrt(a1 * a1 * s2 + 0.5 * b1 * b1 * s2 * s2);
}

double figure_of_merit(const CpbSpectrumd& spectrum, double sigma_x) {
  if (!(sigma_x > 0)) throw ConfigError("figure_of_merit: sigma_x must be > 0");
  if (spectrum.levels() < 3) throw ConfigError("figure_of_merit: spectrum needs >= 3 levels");
  const double sd = sigma_delta(sigma_x, spectrum.slope(1), spectrum.curvature(1));
  if (!(sd > 0)) throw DomainError("figure_of_merit: sigma_delta = 0 (exact sweet spot), merit diverges");
  return 2.0 * std::abs(spectrum.n(0, 2)) / sd;
}

MeritMap merit_map(const GridAxis& j_axis, const GridAxis& qg_axis, double sigma_x, int n_max, int workers) {
  if (!(sigma_x > 0)) throw ConfigError("merit_map: sigma_x must be > 0");
  j_axis.validate("J axis");
  qg_axis.validate("q_g axis");
  MeritMap m;
  m.j_axis = j_axis.values();
  m.qg_axis = qg_axis.values();
  const std::size_t nq = m.qg_axis.size();
  m.rows.resize(m.j_axis.size() * nq);
  parallel_for(m.rows.size(), workers, [&](std::size_t c) {
    MeritRow& r = m.rows[c];
    r.J = m.j_axis[c / nq];
    r.q_g = m.qg_axis[c % nq];
    const CpbSpectrumd s = cpb_spectrum(CpbModeld{r.J, r.q_g, n_max}, 3);
    r.n02 = std::abs(s.n(0, 2));
    r.a1 = s.slope(1);
    r.b1 = s.curvature(1);
    r.sigma_delta = sigma_delta(sigma_x, r.a1, r.b1);
    r.merit = r.sigma_delta > 0 ? 2.0 * r.n02 / r.sigma_delta : std::numeric_limits<double>::quiet_NaN();
  });
  return m;
}

// --- dephasing comparison ------------------------------------------------------

const char* to_string(DephasingMode m) { return m == DephasingMode::Markov ? "markov" : "spa"; }

std::vector<DephasingRow> dephasing_scan(const std::vector<double>& omega0T_list, const DephasingSpec& spec) {
  if (!(spec.t2 > 0)) throw ConfigError("dephasing_scan: T2 must be > 0");
  if (omega0T_list.empty()) throw ConfigError("dephasing_scan: empty Omega0*T list");
  for (double w : omega0T_list)
    if (!(w > 0)) throw ConfigError("dephasing_scan: Omega0*T values must be > 0");

  // Static offset x shifts delta by a1 x and delta_p by a2 x.
  CpbSpectrumd slopes;
  slopes.energies = Eigen::Vector3d::Zero();
  slopes.n_matrix = Eigen::Matrix3d::Zero();
  slopes.n_slope = slopes.n_curvature = Eigen::Matrix3d::Zero();
  slopes.slope = Eigen::Vector3d(0, spec.a1, spec.a2);
  slopes.curvature = Eigen::Vector3d::Zero();

  SpaSpec spa;
  spa.sigma_x = gaussian_dephasing_equivalent(spec.t2, spec.a1);
  spa.order = spec.order;
  MarkovRatesd rates;
  rates.dephasing_01 = 1.0 / spec.t2;
  PropagationOptionsd opts;
  opts.tol = spec.tol;

  std::vector<DephasingRow> rows(2 * omega0T_list.size());
  parallel_for(rows.size(), spec.workers, [&](std::size_t k) {
    DephasingRow& row = rows[k];
    row.omega0T = omega0T_list[k / 2];
    row.mode = k % 2 == 0 ? DephasingMode::Markov : DephasingMode::Spa;
    const ThreeLevelDrived d{
        PulseParamsd::symmetric(row.omega0T, spec.tau_over_T, 1.0, spec.kappa_p, spec.kappa_s), {}};
    const std::vector<double> grid = time_grid(d.pulses.t_start, d.pulses.t_end, 2);
    if (row.mode == DephasingMode::Markov) {
      row.populations =
          propagate_lindblad(d, rates, pure_density(bare_state<double>(0)), grid, opts).final_populations();
    } else {
      row.populations = spa_average(d, slopes, spa, {}, bare_state<double>(0), grid, opts).final_populations;
    }
  });
  return rows;
}

}  // namespace stirap
