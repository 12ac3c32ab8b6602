#ifndef STIRAP_ANALYSIS_HPP
#define STIRAP_ANALYSIS_HPP

// Derived quantities built on the propagators: efficiency diagrams over
// (delta, delta_p) with iso-efficiency contours, Landau-Zener pattern
// classes, two-photon linewidths, the charge-noise figure of merit and the
// Markovian vs static-noise dephasing comparison.

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "stirap/cpb.hpp"
#include "stirap/dynamics.hpp"
#include "stirap/model3.hpp"
#include "stirap/noise.hpp"
#include "stirap/sweep.hpp"

namespace stirap {

struct GridAxis {
  double min = -1;
  double max = 1;
  int points = 81;

  std::vector<double> values() const;
  void validate(const char* name) const;
};

struct Polyline {
  double level = 0;
  std::vector<Eigen::Vector2d> points;  // (x, y) in axis coordinates
  bool closed = false;
};

/// Iso-lines of a scalar field sampled on a rectilinear grid, by marching
/// squares with linear interpolation along cell edges. values(iy, ix) holds
/// the sample at (x[ix], y[iy]). Segments are joined into polylines; a
/// polyline is closed when it returns to its starting edge.
std::vector<Polyline> marching_squares(const std::vector<double>& x, const std::vector<double>& y,
                                       const Eigen::MatrixXd& values, double level);

struct EfficiencyMap {
  std::vector<double> delta_axis;    // units of omega0
  std::vector<double> delta_p_axis;  // units of omega0
  Eigen::MatrixXd values;  // values(i_delta_p, i_delta); NaN for failed cells
  std::vector<Polyline> contours;
  std::vector<std::string> failures;  // "i_delta,i_delta_p: message"
  bool complete = true;
};

struct DiagramSpec {
  GridAxis delta{-1, 1, 81};    // in units of omega0
  GridAxis delta_p{-1, 1, 81};  // in units of omega0
  std::vector<double> levels{0.9};
  double tol = 1e-9;
  SweepOptions sweep;
};

/// Transfer efficiency |0> -> |1> on every (delta, delta_p) cell plus contour
/// lines at the requested levels. Failed cells are recorded, not fatal.
EfficiencyMap efficiency_diagram(const PulseParamsd& pulses, const DiagramSpec& spec);

/// Length of the segment of an axis line (delta = 0 or delta_p = 0) through
/// the origin on which the map stays at or above `level`, with linear
/// interpolation of the crossings. Returns the full axis span when the
/// region reaches the grid edge.
double region_extent_along_delta(const EfficiencyMap& map, double level);
double region_extent_along_delta_p(const EfficiencyMap& map, double level);

enum class LzPattern { A, B, C };

/// a: delta_p/delta > 1, b: delta_p/delta < 0, c: 0 <= delta_p/delta < 1.
/// The boundary ratio 1 (delta_s = 0) is assigned to a. Throws DomainError
/// for delta = 0.
LzPattern lz_classify(double delta, double delta_p);
char to_char(LzPattern p);

struct LinewidthOptions {
  double level = 0.5;
  double tol = 1e-9;
  double resolution = 1e-3;  // bisection tolerance, units of omega0
  double scan_step = 0.02;   // bracketing step, units of omega0
  double max_extent = 2.0;   // units of omega0
};

struct Linewidth {
  double delta_half = 0;    // symmetrized half-width
  double positive = 0;      // crossing for delta > 0
  double negative = 0;      // |crossing| for delta < 0
};

/// Half-width in delta of the efficient-transfer window along the line
/// delta_p = slope * delta.
Linewidth two_photon_linewidth(const PulseParamsd& pulses, double slope, const LinewidthOptions& opts = {});

double sigma_delta(double sigma_x, double a1, double b1);

/// 2 |n_02| / sigma_delta for the level-1 slope and curvature of the spectrum.
double figure_of_merit(const CpbSpectrumd& spectrum, double sigma_x);

struct MeritRow {
  double J = 0;
  double q_g = 0;
  double n02 = 0;
  double a1 = 0;
  double b1 = 0;
  double sigma_delta = 0;
  double merit = 0;  // NaN when out of domain (sigma_delta = 0)
};

struct MeritMap {
  std::vector<double> j_axis;
  std::vector<double> qg_axis;
  std::vector<MeritRow> rows;  // J-major order
};

MeritMap merit_map(const GridAxis& j_axis, const GridAxis& qg_axis, double sigma_x, int n_max = 10,
                   int workers = 1);

enum class DephasingMode { Markov, Spa };
const char* to_string(DephasingMode m);

struct DephasingRow {
  double omega0T = 0;
  DephasingMode mode = DephasingMode::Markov;
  Eigen::Vector3d populations = Eigen::Vector3d::Zero();
};

struct DephasingSpec {
  double t2 = 1;          // units of T
  double tau_over_T = 0.6;
  double kappa_p = 1;
  double kappa_s = 1;
  // Detuning slopes dE/dx of levels 1 and 2 in units of 1/T; sigma_x is
  // derived from a1 and T2.
  double a1 = 1;
  double a2 = 0;
  int order = 21;
  double tol = 1e-9;
  int workers = 1;
};

/// For each Omega0*T: Lindblad run with dephasing_01 = 1/T2 (markov) and the
/// static-noise average with sigma_x = sqrt(2)/(|a1| T2) (spa). Markov rows
/// precede spa rows for each Omega0*T.
std::vector<DephasingRow> dephasing_scan(const std::vector<double>& omega0T_list, const DephasingSpec& spec);

}  // namespace stirap

#endif  // STIRAP_ANALYSIS_HPP
