#ifndef STIRAP_NOISE_HPP
#define STIRAP_NOISE_HPP

// Low-frequency (1/f-like) noise in the static path approximation: the gate
// charge offset x is frozen during each run and drawn from a Gaussian p(x);
// observables are averaged over p(x). Also the closed-form Markovian
// dephasing comparator and the Gaussian/exponential T2 matching.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "stirap/cpb.hpp"
#include "stirap/dynamics.hpp"
#include "stirap/model3.hpp"

namespace stirap {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;  // probabilities, sum to 1
};

/// Gauss-Hermite rule for the N(0, sigma_x^2) density (probabilists'
/// Hermite, Golub-Welsch). Exact for polynomials up to degree 2*order - 1.
/// sigma_x = 0 collapses to the single node x = 0.
QuadratureRule gauss_hermite_nodes(int order, double sigma_x);

/// `samples` equally weighted draws from N(0, sigma_x^2); the seed fully
/// determines the stream.
QuadratureRule monte_carlo_nodes(int samples, double sigma_x, std::uint64_t seed);

enum class SpaMethod { GaussHermite, MonteCarlo };

struct FluctuationTiers {
  bool detuning_linear = true;
  bool detuning_quadratic = false;
  bool rabi_linear = false;
  bool rabi_quadratic = false;
};

struct SpaSpec {
  double sigma_x = 0;
  SpaMethod method = SpaMethod::GaussHermite;
  int order = 21;
  int samples = 10000;
  std::uint64_t seed = 1;
  FluctuationTiers fluctuate;
  // Charging-energy unit expressed in the drive's frequency unit; converts
  // A_i x, B_i x^2 into detunings of the ThreeLevelDrive.
  double energy_scale = 1;
  int workers = 1;

  void validate() const;
};

struct SpaResult {
  double efficiency = 0;
  double standard_error = 0;  // Monte Carlo only; 0 for quadrature
  Eigen::Vector3d final_populations = Eigen::Vector3d::Zero();
  Trajectoryd averaged;  // weighted population histories on the input grid
  std::size_t evaluations = 0;
};

/// Drive seen by the system at static offset x: nominal detunings plus the
/// band-structure shifts, and optionally Rabi frequencies rescaled by
/// n_02(q_g + x)/n_02(q_g), n_12(q_g + x)/n_12(q_g). Field frequencies stay at
/// the nominal resonance.
ThreeLevelDrived displaced_drive(const ThreeLevelDrived& base, const CpbSpectrumd& spectrum,
                                 const SpaSpec& spec, double x);

/// Ensemble average over p(x). Uses Lindblad propagation when any rate is
/// nonzero, unitary evolution otherwise. The reduction runs in node order, so
/// results are bit-identical for any worker count.
SpaResult spa_average(const ThreeLevelDrived& base, const CpbSpectrumd& spectrum, const SpaSpec& spec,
                      const MarkovRatesd& rates, const StateVectord& psi0,
                      const std::vector<double>& grid, const PropagationOptionsd& opts = {});

SpaResult spa_average(const ThreeLevelDrived& base, const CpbSpectrumd& spectrum, const SpaSpec& spec,
                      const MarkovRatesd& rates, const StateVectord& psi0);

struct FinalPopulations {
  double rho00 = 0;
  double rho11 = 0;
  double rho22 = 0;
};

/// End-of-protocol populations of adiabatic STIRAP with Markovian dephasing
/// of the 0-1 coherence at rate gamma_01 (Gaussian pulses of width T and
/// half separation tau, large Omega0*T).
FinalPopulations markovian_final_populations(double gamma_01, double width, double tau);

/// sigma_x = sqrt(2)/(|A1| T2): the static spread whose Gaussian coherence
/// decay exp(-(A1 sigma_x t)^2/2) reaches 1/e at t = T2.
double gaussian_dephasing_equivalent(double t2, double a1);

}  // namespace stirap

#endif  // STIRAP_NOISE_HPP
