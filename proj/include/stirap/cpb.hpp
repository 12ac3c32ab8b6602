#ifndef STIRAP_CPB_HPP
#define STIRAP_CPB_HPP

// Cooper pair box in the charge basis n in [-n_max, n_max]:
//
//   H0 = sum_n (q_g - n)^2 |n><n| - J/2 (|n+1><n| + h.c.)
//
// Energies are in the charging unit of the (q_g - n)^2 term. The spectrum
// carries the quantities that map charge noise x onto the Lambda drive:
// level slopes A_i and curvatures B_i (relative to E_0) and the charge
// matrix elements n_ij that set the Rabi couplings.

#include <Eigen/Dense>

#include <cmath>
#include <sstream>

#include "stirap/errors.hpp"
#include "stirap/model3.hpp"

namespace stirap {

template <typename Scalar>
struct CpbModel {
  Scalar J = 1;
  Scalar q_g = Scalar(0.5);
  int n_max = 10;

  int basis_size() const { return 2 * n_max + 1; }

  void validate() const {
    std::ostringstream why;
    if (!(J >= 0)) why << "J must be >= 0; ";
    if (n_max < 3) why << "n_max must be >= 3; ";
    if (!std::isfinite(q_g)) why << "q_g must be finite; ";
    if (!why.str().empty()) throw ConfigError("CpbModel: " + why.str());
  }
};

template <typename Scalar>
struct CpbSpectrum {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  CpbModel<Scalar> model;
  Vector energies;   // ascending, E_0 = 0
  Matrix n_matrix;   // <i|n|j>, real symmetric
  Vector slope;      // A_i = d(E_i - E_0)/dq_g
  Vector curvature;  // B_i = d^2(E_i - E_0)/dq_g^2
  Matrix n_slope;      // d n_ij / dq_g
  Matrix n_curvature;  // d^2 n_ij / dq_g^2

  int levels() const { return static_cast<int>(energies.size()); }
  Scalar n(int i, int j) const { return n_matrix(i, j); }
};

/// Full eigen-decomposition of the truncated charge Hamiltonian.
template <typename Scalar>
struct CpbEigensystem {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> energies;  // absolute, ascending
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> charges;  // n for each basis index
};

template <typename Scalar>
CpbEigensystem<Scalar> cpb_eigensystem(const CpbModel<Scalar>& m) {
  m.validate();
  const int dim = m.basis_size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> diag(dim), sub(dim - 1);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> charges(dim);
  for (int k = 0; k < dim; ++k) {
    charges(k) = Scalar(k - m.n_max);
    diag(k) = (m.q_g - charges(k)) * (m.q_g - charges(k));
  }
  sub.setConstant(-m.J / Scalar(2));

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw NumericError("cpb: eigensolver did not converge");

  CpbEigensystem<Scalar> es{solver.eigenvalues(), solver.eigenvectors(), charges};
  // Real gauge: largest-magnitude component positive.
  for (int k = 0; k < dim; ++k) {
    Eigen::Index imax = 0;
    es.vectors.col(k).cwiseAbs().maxCoeff(&imax);
    if (es.vectors(imax, k) < 0) es.vectors.col(k) *= Scalar(-1);
  }
  return es;
}

namespace detail {

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> charge_matrix(const CpbEigensystem<Scalar>& es,
                                                                    int levels) {
  const auto v = es.vectors.leftCols(levels);
  return v.transpose() * es.charges.asDiagonal() * v;
}

// Charge matrix at a displaced bias, with eigenvector signs aligned to a
// reference eigensystem so finite differences stay smooth.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> aligned_charge_matrix(
    CpbModel<Scalar> m, Scalar q_g, const CpbEigensystem<Scalar>& reference, int levels) {
  m.q_g = q_g;
  CpbEigensystem<Scalar> es = cpb_eigensystem(m);
  for (int k = 0; k < levels; ++k)
    if (reference.vectors.col(k).dot(es.vectors.col(k)) < 0) es.vectors.col(k) *= Scalar(-1);
  return charge_matrix(es, levels);
}

}  // namespace detail

/// Lowest `levels` states of the box with slopes, curvatures and charge
/// matrix elements. Throws TruncationError when growing the charge basis by
/// one changes the lowest three energies by more than 1e-10.
template <typename Scalar>
CpbSpectrum<Scalar> cpb_spectrum(const CpbModel<Scalar>& m, int levels = 3) {
  m.validate();
  if (levels < 1 || levels > 2 * m.n_max - 1) {
    std::ostringstream os;
    os << "cpb_spectrum: levels must be in [1, 2*n_max-1] = [1, " << 2 * m.n_max - 1 << "]";
    throw ConfigError(os.str());
  }
  const CpbEigensystem<Scalar> es = cpb_eigensystem(m);
  const int dim = m.basis_size();

  {
    CpbModel<Scalar> bigger = m;
    bigger.n_max += 1;
    const CpbEigensystem<Scalar> check = cpb_eigensystem(bigger);
    const int k = std::min(3, dim);
    const Scalar drift = (check.energies.head(k) - es.energies.head(k)).cwiseAbs().maxCoeff();
    if (drift > Scalar(1e-10)) {
      std::ostringstream os;
      os << "cpb_spectrum: charge basis n_max=" << m.n_max << " not converged (drift " << drift
         << "); increase n_max";
      throw TruncationError(os.str());
    }
  }

  CpbSpectrum<Scalar> s;
  s.model = m;
  s.energies = es.energies.head(levels).array() - es.energies(0);
  const auto full_n = detail::charge_matrix(es, dim);
  s.n_matrix = full_n.topLeftCorner(levels, levels);

  // Hellmann-Feynman: dE_i/dq = <i|2(q - n)|i>; second order:
  // d2E_i/dq2 = 2 + 2 sum_{k != i} |<k|dH/dq|i>|^2 / (E_i - E_k), <k|dH/dq|i> = -2 n_ki.
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> abs_slope(levels), abs_curv(levels);
  for (int i = 0; i < levels; ++i) {
    abs_slope(i) = Scalar(2) * (m.q_g - full_n(i, i));
    Scalar sum = 0;
    for (int k = 0; k < dim; ++k) {
      if (k == i) continue;
      sum += Scalar(4) * full_n(k, i) * full_n(k, i) / (es.energies(i) - es.energies(k));
    }
    abs_curv(i) = Scalar(2) + Scalar(2) * sum;
  }
  s.slope = abs_slope.array() - abs_slope(0);
  s.curvature = abs_curv.array() - abs_curv(0);

  const Scalar h = Scalar(1e-4);
  const auto n_plus = detail::aligned_charge_matrix(m, m.q_g + h, es, levels);
  const auto n_minus = detail::aligned_charge_matrix(m, m.q_g - h, es, levels);
  s.n_slope = (n_plus - n_minus) / (Scalar(2) * h);
  s.n_curvature = (n_plus - Scalar(2) * s.n_matrix + n_minus) / (h * h);
  return s;
}

enum class ExpansionOrder { Linear, Quadratic };

/// Detunings induced by a static charge offset x at nominal resonance:
/// delta = A_1 x + B_1 x^2 / 2, delta_p = A_2 x + B_2 x^2 / 2 (charging units).
template <typename Scalar>
DetuningParams<Scalar> detuning_fluctuations(const CpbSpectrum<Scalar>& s, Scalar x,
                                             ExpansionOrder order) {
  if (s.levels() < 3) throw ConfigError("detuning_fluctuations: spectrum needs >= 3 levels");
  DetuningParams<Scalar> d;
  d.delta = s.slope(1) * x;
  d.delta_p = s.slope(2) * x;
  if (order == ExpansionOrder::Quadratic) {
    d.delta += Scalar(0.5) * s.curvature(1) * x * x;
    d.delta_p += Scalar(0.5) * s.curvature(2) * x * x;
  }
  return d;
}

/// Rabi frequencies for drive amplitudes coupling through the charge operator.
template <typename Scalar>
Envelopes<Scalar> rabi_from_drive(const CpbSpectrum<Scalar>& s, Scalar amp_p, Scalar amp_s) {
  if (s.levels() < 3) throw ConfigError("rabi_from_drive: spectrum needs >= 3 levels");
  return {amp_p * s.n(0, 2), amp_s * s.n(1, 2)};
}

/// Peak pump Rabi frequency Omega_R n_02(q_g) / n_01(1/2) for a drive that
/// produces Rabi oscillations Omega_R on the 0-1 transition at the symmetry
/// point.
template <typename Scalar>
Scalar calibrated_omega0(const CpbModel<Scalar>& m, Scalar rabi_ref) {
  CpbModel<Scalar> sym = m;
  sym.q_g = Scalar(0.5);
  const auto at_bias = cpb_spectrum(m, 3);
  const auto at_sym = cpb_spectrum(sym, 3);
  return rabi_ref * std::abs(at_bias.n(0, 2)) / std::abs(at_sym.n(0, 1));
}

using CpbModeld = CpbModel<double>;
using CpbSpectrumd = CpbSpectrum<double>;

}  // namespace stirap

#endif  // STIRAP_CPB_HPP
