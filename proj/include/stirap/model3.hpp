#ifndef STIRAP_MODEL3_HPP
#define STIRAP_MODEL3_HPP

// Driven three-level Lambda system in the rotating frame: Gaussian pulse
// envelopes, the RWA Hamiltonian, the dark state and the instantaneous
// (adiabatic) eigenbasis.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>
#include <vector>

#include "stirap/errors.hpp"

namespace stirap {

template <typename Scalar>
using Vector3c = Eigen::Matrix<std::complex<Scalar>, 3, 1>;
template <typename Scalar>
using Matrix3c = Eigen::Matrix<std::complex<Scalar>, 3, 3>;

/// Amplitude of a state vector in the bare basis {|0>, |1>, |2>}.
template <typename Scalar>
using StateVector = Vector3c<Scalar>;

template <typename Scalar>
StateVector<Scalar> bare_state(int level) {
  StateVector<Scalar> psi = StateVector<Scalar>::Zero();
  psi(level) = 1;
  return psi;
}

/// Gaussian pump/Stokes pair. The Stokes pulse peaks at -tau and the pump at
/// +tau, so tau > 0 is the counterintuitive sequence.
template <typename Scalar>
struct PulseParams {
  Scalar omega0 = 20;  // peak Rabi frequency scale
  Scalar kappa_p = 1;
  Scalar kappa_s = 1;
  Scalar tau = Scalar(0.6);  // half separation of the peaks
  Scalar width = 1;          // Gaussian width T
  Scalar t_start = -Scalar(4.6);
  Scalar t_end = Scalar(4.6);

  /// Window [-(tau + tails*T), +(tau + tails*T)]; at tails = 4 the envelopes
  /// are below exp(-16) of their peak at the edges.
  static PulseParams symmetric(Scalar omega0, Scalar tau, Scalar width,
                               Scalar kappa_p = 1, Scalar kappa_s = 1,
                               Scalar tails = 4) {
    PulseParams p;
    p.omega0 = omega0;
    p.kappa_p = kappa_p;
    p.kappa_s = kappa_s;
    p.tau = tau;
    p.width = width;
    p.t_end = std::abs(tau) + tails * width;
    p.t_start = -p.t_end;
    return p;
  }

  Scalar pump_peak() const { return tau; }
  Scalar stokes_peak() const { return -tau; }

  void validate() const {
    std::ostringstream why;
    if (!(omega0 > 0)) why << "omega0 must be > 0; ";
    if (!(width > 0)) why << "pulse width must be > 0; ";
    if (!(kappa_p >= 0) || !(kappa_s >= 0)) why << "kappa_p, kappa_s must be >= 0; ";
    if (!(t_start < t_end)) why << "t_start must be < t_end; ";
    if (!(pump_peak() >= t_start && pump_peak() <= t_end && stokes_peak() >= t_start &&
          stokes_peak() <= t_end))
      why << "pulse peaks must lie inside [t_start, t_end]; ";
    if (!why.str().empty()) throw ConfigError("PulseParams: " + why.str());
  }
};

/// Two-photon detuning delta and pump detuning delta_p. The Stokes detuning
/// is derived, delta_s = delta_p - delta.
template <typename Scalar>
struct DetuningParams {
  Scalar delta = 0;
  Scalar delta_p = 0;

  Scalar delta_s() const { return delta_p - delta; }
};

template <typename Scalar>
struct ThreeLevelDrive {
  PulseParams<Scalar> pulses;
  DetuningParams<Scalar> detunings;
};

template <typename Scalar>
struct Envelopes {
  Scalar pump = 0;
  Scalar stokes = 0;
};

template <typename Scalar>
Envelopes<Scalar> pulse_envelopes(Scalar t, const PulseParams<Scalar>& p) {
  using std::exp;
  const Scalar xp = (t - p.tau) / p.width;
  const Scalar xs = (t + p.tau) / p.width;
  return {p.kappa_p * p.omega0 * exp(-xp * xp), p.kappa_s * p.omega0 * exp(-xs * xs)};
}

template <typename Scalar>
Matrix3c<Scalar> rwa_hamiltonian(const Envelopes<Scalar>& rabi,
                                 const DetuningParams<Scalar>& det) {
  Matrix3c<Scalar> h = Matrix3c<Scalar>::Zero();
  h(1, 1) = det.delta;
  h(2, 2) = det.delta_p;
  h(2, 0) = rabi.pump / Scalar(2);
  h(2, 1) = rabi.stokes / Scalar(2);
  h(0, 2) = std::conj(h(2, 0));
  h(1, 2) = std::conj(h(2, 1));
  return h;
}

template <typename Scalar>
Matrix3c<Scalar> rwa_hamiltonian(Scalar t, const ThreeLevelDrive<Scalar>& d) {
  return rwa_hamiltonian(pulse_envelopes(t, d.pulses), d.detunings);
}

/// Zero-energy eigenvector (Omega_s|0> - Omega_p|1>)/norm of the resonant
/// (delta = 0) Hamiltonian; it never has weight on |2>.
template <typename Scalar>
StateVector<Scalar> dark_state(Scalar omega_p, Scalar omega_s) {
  const Scalar norm = std::hypot(omega_p, omega_s);
  if (!(norm > 0)) throw DomainError("dark state undefined: both Rabi frequencies vanish");
  StateVector<Scalar> d;
  d << omega_s / norm, -omega_p / norm, Scalar(0);
  return d;
}

template <typename Scalar>
struct AdiabaticSpectrum {
  Eigen::Matrix<Scalar, 3, 1> eigenvalues;  // ascending
  Matrix3c<Scalar> eigenvectors;            // columns
};

namespace detail {

// Bring each eigenvector into the phase that makes its largest component real
// and positive (or, when a reference is given, its overlap with the
// reference real and positive).
template <typename Scalar>
void fix_phases(Matrix3c<Scalar>& v, const Matrix3c<Scalar>* reference) {
  for (int k = 0; k < 3; ++k) {
    std::complex<Scalar> anchor;
    if (reference) {
      anchor = reference->col(k).dot(v.col(k));
    } else {
      Eigen::Index imax = 0;
      v.col(k).cwiseAbs().maxCoeff(&imax);
      anchor = v(imax, k);
    }
    if (std::abs(anchor) > 0) v.col(k) *= std::conj(anchor) / std::abs(anchor);
  }
}

}  // namespace detail

/// Instantaneous eigen-decomposition of H(t). Eigenvalues are ascending.
/// When `previous` is supplied, eigenvectors inside (near-)degenerate clusters
/// are matched to the previous grid point by overlap and phases are aligned to
/// it, which keeps Landau-Zener patterns continuous on a time grid.
template <typename Scalar>
AdiabaticSpectrum<Scalar> adiabatic_spectrum(const Matrix3c<Scalar>& h,
                                             const AdiabaticSpectrum<Scalar>* previous = nullptr) {
  AdiabaticSpectrum<Scalar> out;
  const bool diagonal = h(0, 1) == Scalar(0) && h(0, 2) == Scalar(0) && h(1, 2) == Scalar(0);
  if (diagonal && !previous) {
    // Fields off: bare states, ordered by energy with ties in (0, delta, delta_p) order.
    std::array<int, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return h(a, a).real() < h(b, b).real(); });
    out.eigenvectors.setZero();
    for (int k = 0; k < 3; ++k) {
      out.eigenvalues(k) = h(order[k], order[k]).real();
      out.eigenvectors(order[k], k) = 1;
    }
    return out;
  }

  Eigen::SelfAdjointEigenSolver<Matrix3c<Scalar>> solver(h);
  if (solver.info() != Eigen::Success) throw NumericError("adiabatic_spectrum: eigensolver failed");
  out.eigenvalues = solver.eigenvalues();
  out.eigenvectors = solver.eigenvectors();

  if (previous) {
    const Scalar scale = std::max<Scalar>(h.cwiseAbs().maxCoeff(), Scalar(1));
    const Scalar tie = Scalar(1e-9) * scale;
    // Within each cluster of tied eigenvalues, pick the permutation that
    // maximizes overlap with the previous eigenvectors.
    int start = 0;
    while (start < 3) {
      int stop = start + 1;
      while (stop < 3 && out.eigenvalues(stop) - out.eigenvalues(stop - 1) < tie) ++stop;
      if (stop - start > 1) {
        std::array<int, 3> perm{0, 1, 2};
        std::array<int, 3> best = perm;
        Scalar best_score = -1;
        do {
          bool fixed_outside = true;
          for (int k = 0; k < 3; ++k)
            if ((k < start || k >= stop) && perm[k] != k) fixed_outside = false;
          if (!fixed_outside) continue;
          Scalar score = 0;
          for (int k = start; k < stop; ++k)
            score += std::abs(previous->eigenvectors.col(k).dot(out.eigenvectors.col(perm[k])));
          if (score > best_score) {
            best_score = score;
            best = perm;
          }
        } while (std::next_permutation(perm.begin(), perm.end()));
        Matrix3c<Scalar> v = out.eigenvectors;
        for (int k = start; k < stop; ++k) out.eigenvectors.col(k) = v.col(best[k]);
      }
      start = stop;
    }
    detail::fix_phases(out.eigenvectors, &previous->eigenvectors);
  } else {
    detail::fix_phases<Scalar>(out.eigenvectors, nullptr);
  }
  return out;
}

template <typename Scalar>
AdiabaticSpectrum<Scalar> adiabatic_spectrum(Scalar t, const ThreeLevelDrive<Scalar>& d,
                                             const AdiabaticSpectrum<Scalar>* previous = nullptr) {
  return adiabatic_spectrum(rwa_hamiltonian(t, d), previous);
}

/// Eigenvalue histories along a time grid with overlap-continuous tracking.
template <typename Scalar>
std::vector<AdiabaticSpectrum<Scalar>> adiabatic_track(const std::vector<Scalar>& times,
                                                       const ThreeLevelDrive<Scalar>& d) {
  std::vector<AdiabaticSpectrum<Scalar>> out;
  out.reserve(times.size());
  for (Scalar t : times) out.push_back(adiabatic_spectrum(t, d, out.empty() ? nullptr : &out.back()));
  return out;
}

using PulseParamsd = PulseParams<double>;
using DetuningParamsd = DetuningParams<double>;
using ThreeLevelDrived = ThreeLevelDrive<double>;
using StateVectord = StateVector<double>;
using Matrix3cd = Matrix3c<double>;
using Envelopesd = Envelopes<double>;
using AdiabaticSpectrumd = AdiabaticSpectrum<double>;

}  // namespace stirap

#endif  // STIRAP_MODEL3_HPP
