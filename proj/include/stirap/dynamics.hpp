#ifndef STIRAP_DYNAMICS_HPP
#define STIRAP_DYNAMICS_HPP

// Time propagation of the three-level system: Schroedinger evolution of a
// pure state and Lindblad evolution of a density matrix with decay and pure
// dephasing. Both use an embedded Dormand-Prince 5(4) pair with step-size
// control and land exactly on every point of the output grid.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <sstream>
#include <vector>

#include "stirap/errors.hpp"
#include "stirap/model3.hpp"

namespace stirap {

template <typename Scalar>
using DensityMatrix3 = Matrix3c<Scalar>;

/// Markovian rates. decay_ij moves population |i> -> |j>; dephasing_ij is the
/// extra decay rate of the coherence rho_ij.
template <typename Scalar>
struct MarkovRates {
  Scalar decay_10 = 0;
  Scalar decay_20 = 0;
  Scalar decay_21 = 0;
  Scalar dephasing_01 = 0;
  Scalar dephasing_02 = 0;
  Scalar dephasing_12 = 0;

  bool any() const {
    return decay_10 > 0 || decay_20 > 0 || decay_21 > 0 || dephasing_01 > 0 || dephasing_02 > 0 ||
           dephasing_12 > 0;
  }

  void validate() const {
    for (Scalar r : {decay_10, decay_20, decay_21, dephasing_01, dephasing_02, dephasing_12})
      if (!(r >= 0)) throw ConfigError("MarkovRates: all rates must be >= 0");
  }

  // Element-wise damping exp(-g_ij t) of rho_ij is a completely positive map
  // iff the rate matrix is conditionally negative semidefinite on vectors
  // summing to zero. A lone dephasing_01 is not.
  bool dephasing_completely_positive() const {
    const Scalar g01 = dephasing_01, g02 = dephasing_02, g12 = dephasing_12;
    // v = (a, b, -a-b): v^T G v = -2 [a^2 g02 + b^2 g12 + ab (g02 + g12 - g01)]
    const Scalar c = g02 + g12 - g01;
    const Scalar scale = g01 + g02 + g12;
    const Scalar slack = Scalar(1e-12) * scale * scale;
    return g02 >= 0 && g12 >= 0 && c * c <= Scalar(4) * g02 * g12 + slack;
  }
};

template <typename Scalar>
struct Trajectory {
  std::vector<Scalar> times;
  std::vector<Eigen::Matrix<Scalar, 3, 1>> populations;
  std::vector<Scalar> traces;  // norm^2 (unitary) or tr(rho) (Lindblad)
  std::vector<StateVector<Scalar>> states;       // when requested, unitary runs
  std::vector<DensityMatrix3<Scalar>> densities;  // when requested, Lindblad runs
  Scalar min_eigenvalue = 0;                      // Lindblad runs: min over grid
  std::size_t steps = 0;

  Scalar efficiency() const { return populations.back()(1); }
  Eigen::Matrix<Scalar, 3, 1> final_populations() const { return populations.back(); }
  Scalar max_population(int level) const {
    Scalar m = 0;
    for (const auto& p : populations) m = std::max(m, p(level));
    return m;
  }
};

template <typename Scalar>
struct PropagationOptions {
  Scalar tol = Scalar(1e-9);
  bool keep_states = false;
};

/// `points` equally spaced times covering [t0, t1] inclusive.
template <typename Scalar>
std::vector<Scalar> time_grid(Scalar t0, Scalar t1, int points) {
  if (points < 2) throw ConfigError("time_grid: need at least 2 points");
  std::vector<Scalar> g(points);
  for (int k = 0; k < points; ++k) g[k] = t0 + (t1 - t0) * Scalar(k) / Scalar(points - 1);
  g.back() = t1;
  return g;
}

template <typename Scalar>
std::vector<Scalar> protocol_grid(const PulseParams<Scalar>& p, int points = 2000) {
  return time_grid(p.t_start, p.t_end, points);
}

namespace detail {

template <typename State>
bool all_finite(const State& y) {
  return y.allFinite();
}

// Dormand-Prince 5(4) tableau.
struct Dopri5 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // b - b_hat (error estimate weights), stage 7 is FSAL.
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

// Integrates dy/dt = f(t, y) across the grid, invoking observe(k, y) at each
// grid point. Local error per step is kept below tol * (1 + |y|) in max-norm.
template <typename Scalar, typename State, typename Rhs, typename Observe>
std::size_t integrate_dopri5(Rhs&& f, State y, const std::vector<Scalar>& grid, Scalar tol,
                             Observe&& observe) {
  using T = Dopri5;
  if (grid.size() < 2) throw ConfigError("propagate: grid needs at least 2 points");
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1])) throw ConfigError("propagate: grid must be strictly increasing");
  if (!(tol >= Scalar(1e-12) && tol <= Scalar(1e-4)))
    throw ConfigError("propagate: tol must lie in [1e-12, 1e-4]");

  const Scalar span = grid.back() - grid.front();
  const Scalar h_min = span * Scalar(1e-13);
  Scalar t = grid.front();
  Scalar h = std::min(span / Scalar(100), grid[1] - grid[0]);
  std::size_t steps = 0;

  observe(std::size_t{0}, y);
  State k1 = f(t, y);
  for (std::size_t g = 1; g < grid.size(); ++g) {
    const Scalar target = grid[g];
    while (t < target) {
      // h is the controller's preferred step; hs is the step actually taken.
      const bool last = t + h >= target - h_min;
      const Scalar hs = last ? target - t : h;
      const State k2 = f(t + T::c2 * hs, State(y + hs * (T::a21 * k1)));
      const State k3 = f(t + T::c3 * hs, State(y + hs * (T::a31 * k1 + T::a32 * k2)));
      const State k4 =
          f(t + T::c4 * hs, State(y + hs * (T::a41 * k1 + T::a42 * k2 + T::a43 * k3)));
      const State k5 = f(t + T::c5 * hs, State(y + hs * (T::a51 * k1 + T::a52 * k2 +
                                                          T::a53 * k3 + T::a54 * k4)));
      const State k6 = f(t + hs, State(y + hs * (T::a61 * k1 + T::a62 * k2 + T::a63 * k3 +
                                                 T::a64 * k4 + T::a65 * k5)));
      const State y_new =
          y + hs * (T::b1 * k1 + T::b3 * k3 + T::b4 * k4 + T::b5 * k5 + T::b6 * k6);
      const State k7 = f(t + hs, y_new);
      const State err =
          hs * (T::e1 * k1 + T::e3 * k3 + T::e4 * k4 + T::e5 * k5 + T::e6 * k6 + T::e7 * k7);

      const Scalar scale =
          tol * (Scalar(1) + std::max(y.cwiseAbs().maxCoeff(), y_new.cwiseAbs().maxCoeff()));
      const Scalar ratio = err.cwiseAbs().maxCoeff() / scale;
      if (!std::isfinite(ratio) || !all_finite(y_new)) {
        if (hs <= h_min) throw NumericError("propagate: non-finite state (numeric blow-up)");
        h = Scalar(0.25) * hs;
        continue;
      }
      if (ratio <= Scalar(1)) {
        t = last ? target : t + hs;
        y = y_new;
        k1 = k7;
        ++steps;
        const Scalar grow = ratio > 0 ? Scalar(0.9) * std::pow(ratio, Scalar(-0.2)) : Scalar(5);
        const Scalar next = hs * std::clamp(grow, Scalar(0.2), Scalar(5));
        h = last ? std::max(h, next) : next;
      } else {
        h = hs * std::max(Scalar(0.9) * std::pow(ratio, Scalar(-0.25)), Scalar(0.1));
        if (h < h_min) {
          std::ostringstream os;
          os << "propagate: step size underflow at t=" << t << " (stiff or discontinuous problem)";
          throw NumericError(os.str());
        }
      }
    }
    observe(g, y);
  }
  return steps;
}

}  // namespace detail

/// Solves i dpsi/dt = H(t) psi for an arbitrary Hamiltonian callable
/// `hamiltonian(t) -> Matrix3c`. No renormalization is applied.
template <typename Scalar, typename HamiltonianFn>
  requires std::invocable<HamiltonianFn&, Scalar>
Trajectory<Scalar> propagate_unitary(HamiltonianFn&& hamiltonian, const StateVector<Scalar>& psi0,
                                     const std::vector<Scalar>& grid,
                                     const PropagationOptions<Scalar>& opts = {}) {
  using State = StateVector<Scalar>;
  const std::complex<Scalar> minus_i(0, -1);
  Trajectory<Scalar> tr;
  tr.times = grid;
  tr.populations.resize(grid.size());
  tr.traces.resize(grid.size());
  if (opts.keep_states) tr.states.resize(grid.size());

  auto rhs = [&](Scalar t, const State& psi) -> State { return minus_i * (hamiltonian(t) * psi); };
  auto observe = [&](std::size_t k, const State& psi) {
    tr.populations[k] = psi.cwiseAbs2();
    tr.traces[k] = tr.populations[k].sum();
    if (opts.keep_states) tr.states[k] = psi;
  };
  tr.steps = detail::integrate_dopri5<Scalar>(rhs, psi0, grid, opts.tol, observe);
  return tr;
}

template <typename Scalar>
Trajectory<Scalar> propagate_unitary(const ThreeLevelDrive<Scalar>& d, const StateVector<Scalar>& psi0,
                                     const std::vector<Scalar>& grid,
                                     const PropagationOptions<Scalar>& opts = {}) {
  return propagate_unitary<Scalar>([&d](Scalar t) { return rwa_hamiltonian(t, d); }, psi0, grid,
                                   opts);
}

/// Lindblad generator for the three-level system: jump operators |0><1|,
/// |0><2|, |1><2| at the decay rates, plus pure dephasing that damps each
/// coherence rho_ij at exactly dephasing_ij, independently per pair.
template <typename Scalar>
DensityMatrix3<Scalar> lindblad_rhs(const Matrix3c<Scalar>& h, const MarkovRates<Scalar>& r,
                                    const DensityMatrix3<Scalar>& rho) {
  const std::complex<Scalar> minus_i(0, -1);
  DensityMatrix3<Scalar> out = minus_i * (h * rho - rho * h);

  // Decay |a> -> |b| with L = sqrt(g)|b><a|: gain g rho_aa on (b,b), coherences
  // involving a decay at g/2.
  auto decay = [&](int a, int b, Scalar g) {
    if (g == Scalar(0)) return;
    out(b, b) += g * rho(a, a);
    for (int k = 0; k < 3; ++k) {
      out(a, k) -= Scalar(0.5) * g * rho(a, k);
      out(k, a) -= Scalar(0.5) * g * rho(k, a);
    }
  };
  decay(1, 0, r.decay_10);
  decay(2, 0, r.decay_20);
  decay(2, 1, r.decay_21);

  auto dephase = [&](int a, int b, Scalar g) {
    if (g == Scalar(0)) return;
    out(a, b) -= g * rho(a, b);
    out(b, a) -= g * rho(b, a);
  };
  dephase(0, 1, r.dephasing_01);
  dephase(0, 2, r.dephasing_02);
  dephase(1, 2, r.dephasing_12);
  return out;
}

template <typename Scalar, typename HamiltonianFn>
  requires std::invocable<HamiltonianFn&, Scalar>
Trajectory<Scalar> propagate_lindblad(HamiltonianFn&& hamiltonian, const MarkovRates<Scalar>& rates,
                                      const DensityMatrix3<Scalar>& rho0,
                                      const std::vector<Scalar>& grid,
                                      const PropagationOptions<Scalar>& opts = {}) {
  rates.validate();
  {
    const Scalar herm = (rho0 - rho0.adjoint()).cwiseAbs().maxCoeff();
    const Scalar trace_err = std::abs(rho0.trace() - Scalar(1));
    Eigen::SelfAdjointEigenSolver<DensityMatrix3<Scalar>> es(rho0);
    if (herm > Scalar(1e-12) || trace_err > Scalar(1e-12) ||
        es.eigenvalues().minCoeff() < -Scalar(1e-12))
      throw ConfigError("propagate_lindblad: rho0 must be Hermitian, unit-trace and positive");
  }
  using State = DensityMatrix3<Scalar>;
  Trajectory<Scalar> tr;
  tr.times = grid;
  tr.populations.resize(grid.size());
  tr.traces.resize(grid.size());
  if (opts.keep_states) tr.densities.resize(grid.size());
  tr.min_eigenvalue = Scalar(1);
  const bool enforce_positivity = rates.dephasing_completely_positive();

  auto rhs = [&](Scalar t, const State& rho) -> State {
    return lindblad_rhs<Scalar>(hamiltonian(t), rates, rho);
  };
  auto observe = [&](std::size_t k, const State& rho) {
    const State herm = Scalar(0.5) * (rho + rho.adjoint());
    tr.populations[k] = herm.diagonal().real();
    tr.traces[k] = herm.trace().real();
    Eigen::SelfAdjointEigenSolver<State> es(herm, Eigen::EigenvaluesOnly);
    const Scalar lo = es.eigenvalues().minCoeff();
    tr.min_eigenvalue = std::min(tr.min_eigenvalue, lo);
    if (lo < -Scalar(1e-7) && enforce_positivity) {
      std::ostringstream os;
      os << "propagate_lindblad: density matrix lost positivity (eigenvalue " << lo << " at t="
         << grid[k] << ")";
      throw NumericError(os.str());
    }
    if (opts.keep_states) tr.densities[k] = rho;
  };
  tr.steps = detail::integrate_dopri5<Scalar>(rhs, rho0, grid, opts.tol, observe);
  return tr;
}

template <typename Scalar>
Trajectory<Scalar> propagate_lindblad(const ThreeLevelDrive<Scalar>& d, const MarkovRates<Scalar>& rates,
                                      const DensityMatrix3<Scalar>& rho0,
                                      const std::vector<Scalar>& grid,
                                      const PropagationOptions<Scalar>& opts = {}) {
  return propagate_lindblad<Scalar>([&d](Scalar t) { return rwa_hamiltonian(t, d); }, rates, rho0,
                                    grid, opts);
}

template <typename Scalar>
DensityMatrix3<Scalar> pure_density(const StateVector<Scalar>& psi) {
  return psi * psi.adjoint();
}

using MarkovRatesd = MarkovRates<double>;
using Trajectoryd = Trajectory<double>;
using PropagationOptionsd = PropagationOptions<double>;
using DensityMatrix3d = DensityMatrix3<double>;

}  // namespace stirap

#endif  // STIRAP_DYNAMICS_HPP
