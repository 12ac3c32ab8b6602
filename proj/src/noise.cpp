#include "stirap/noise.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "stirap/errors.hpp"
#include "stirap/sweep.hpp"

namespace stirap {

QuadratureRule gauss_hermite_nodes(int order, double sigma_x) {
  if (order < 3 || order % 2 == 0) throw ConfigError("gauss_hermite_nodes: order must be odd and >= 3");
  if (!(sigma_x >= 0)) throw ConfigError("gauss_hermite_nodes: sigma_x must be >= 0");
  if (sigma_x == 0) return {{0.0}, {1.0}};

  // Jacobi matrix of the monic probabilists' Hermite recurrence:
  // He_{k+1} = x He_k - k He_{k-1}.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd sub(order - 1);
  for (int k = 1; k < order; ++k) sub(k - 1) = std::sqrt(double(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw NumericError("gauss_hermite_nodes: eigensolver failed");

  QuadratureRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  double total = 0;
  for (int k = 0; k < order; ++k) {
    rule.nodes[k] = sigma_x * solver.eigenvalues()(k);
    const double v0 = solver.eigenvectors()(0, k);
    rule.weights[k] = v0 * v0;
    total += rule.weights[k];
  }
  for (double& w : rule.weights) w /= total;
  // The rule is symmetric; enforce it exactly so x = 0 is a node and odd
  // moments vanish to rounding.
  for (int k = 0; k < order / 2; ++k) {
    const int m = order - 1 - k;
    const double x = 0.5 * (rule.nodes[m] - rule.nodes[k]);
    const double w = 0.5 * (rule.weights[m] + rule.weights[k]);
    rule.nodes[k] = -x;
    rule.nodes[m] = x;
    rule.weights[k] = rule.weights[m] = w;
  }
  rule.nodes[order / 2] = 0.0;
  return rule;
}

QuadratureRule monte_carlo_nodes(int samples, double sigma_x, std::uint64_t seed) {
  if (samples < 1) throw ConfigError("monte_carlo_nodes: samples must be >= 1");
  if (!(sigma_x >= 0)) throw ConfigError("monte_carlo_nodes: sigma_x must be >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  QuadratureRule rule;
  rule.nodes.resize(samples);
  rule.weights.assign(samples, 1.0 / samples);
  for (double& x : rule.nodes) x = sigma_x * normal(rng);
  return rule;
}

void SpaSpec::validate() const {
  std::ostringstream why;
  if (!(sigma_x >= 0)) why << "sigma_x must be >= 0; ";
  if (method == SpaMethod::GaussHermite && (order < 3 || order % 2 == 0))
    why << "quadrature order must be odd and >= 3; ";
  if (method == SpaMethod::MonteCarlo && samples < 1) why << "samples must be >= 1; ";
  if (fluctuate.detuning_quadratic && !fluctuate.detuning_linear)
    why << "quadratic detuning fluctuations require the linear tier; ";
  if (fluctuate.rabi_quadratic && !fluctuate.rabi_linear)
    why << "quadratic Rabi fluctuations require the linear tier; ";
  if (!(energy_scale > 0) || !std::isfinite(energy_scale)) why << "energy_scale must be > 0; ";
  if (!why.str().empty()) throw ConfigError("SpaSpec: " + why.str());
}

ThreeLevelDrived displaced_drive(const ThreeLevelDrived& base, const CpbSpectrumd& spectrum,
                                 const SpaSpec& spec, double x) {
  ThreeLevelDrived d = base;
  if (spec.fluctuate.detuning_linear) {
    const auto order =
        spec.fluctuate.detuning_quadratic ? ExpansionOrder::Quadratic : ExpansionOrder::Linear;
    const DetuningParamsd shift = detuning_fluctuations(spectrum, x, order);
    d.detunings.delta += spec.energy_scale * shift.delta;
    d.detunings.delta_p += spec.energy_scale * shift.delta_p;
  }
  if (spec.fluctuate.rabi_linear) {
    auto factor = [&](int i, int j) {
      const double n0 = spectrum.n(i, j);
      if (std::abs(n0) < 1e-12)
        throw DomainError("Rabi fluctuations undefined: nominal coupling n_" + std::to_string(i) +
                          std::to_string(j) + " vanishes");
      double f = 1.0 + spectrum.n_slope(i, j) / n0 * x;
      if (spec.fluctuate.rabi_quadratic) f += 0.5 * spectrum.n_curvature(i, j) / n0 * x * x;
      return std::abs(f);
    };
    d.pulses.kappa_p *= factor(0, 2);
    d.pulses.kappa_s *= factor(1, 2);
  }
  return d;
}

SpaResult spa_average(const ThreeLevelDrived& base, const CpbSpectrumd& spectrum, const SpaSpec& spec,
                      const MarkovRatesd& rates, const StateVectord& psi0,
                      const std::vector<double>& grid, const PropagationOptionsd& opts) {
  spec.validate();
  base.pulses.validate();
  rates.validate();
  QuadratureRule rule{{0.0}, {1.0}};
  if (spec.sigma_x > 0)
    rule = spec.method == SpaMethod::GaussHermite
               ? gauss_hermite_nodes(spec.order, spec.sigma_x)
               : monte_carlo_nodes(spec.samples, spec.sigma_x, spec.seed);

  const bool markov = rates.any();
  std::vector<Trajectoryd> runs(rule.nodes.size());
  parallel_for(rule.nodes.size(), spec.workers, [&](std::size_t k) {
    const ThreeLevelDrived d = spec.sigma_x == 0 ? base : displaced_drive(base, spectrum, spec, rule.nodes[k]);
    runs[k] = markov ? propagate_lindblad(d, rates, pure_density(psi0), grid, opts)
                     : propagate_unitary(d, psi0, grid, opts);
  });

  SpaResult res;
  res.evaluations = runs.size();
  res.averaged.times = grid;
  res.averaged.populations.assign(grid.size(), Eigen::Vector3d::Zero());
  res.averaged.traces.assign(grid.size(), 0.0);
  res.averaged.min_eigenvalue = 1.0;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const double w = rule.weights[k];
    for (std::size_t g = 0; g < grid.size(); ++g) {
      res.averaged.populations[g] += w * runs[k].populations[g];
      res.averaged.traces[g] += w * runs[k].traces[g];
    }
    res.averaged.steps += runs[k].steps;
    res.averaged.min_eigenvalue = std::min(res.averaged.min_eigenvalue, markov ? runs[k].min_eigenvalue : 0.0);
  }
  res.final_populations = res.averaged.populations.back();
  res.efficiency = res.final_populations(1);

  if (spec.method == SpaMethod::MonteCarlo && runs.size() > 1 && spec.sigma_x > 0) {
    double mean = 0, m2 = 0;
    for (std::size_t k = 0; k < runs.size(); ++k) {
      const double v = runs[k].efficiency();
      const double delta = v - mean;
      mean += delta / double(k + 1);
      m2 += delta * (v - mean);
    }
    const double n = double(runs.size());
    res.standard_error = std::sqrt(m2 / (n - 1) / n);
  }
  return res;
}

SpaResult spa_average(const ThreeLevelDrived& base, const CpbSpectrumd& spectrum, const SpaSpec& spec,
                      const MarkovRatesd& rates, const StateVectord& psi0) {
  return spa_average(base, spectrum, spec, rates, psi0, time_grid(base.pulses.t_start, base.pulses.t_end, 2));
}

FinalPopulations markovian_final_populations(double gamma_01, double width, double tau) {
  if (!(gamma_01 >= 0)) throw ConfigError("markovian_final_populations: gamma_01 must be >= 0");
  if (!(width > 0) || !(tau > 0)) throw ConfigError("markovian_final_populations: T and tau must be > 0");
  const double e = std::exp(-3.0 * gamma_01 * width * width / (8.0 * tau));
  FinalPopulations f;
  f.rho11 = 1.0 / 3.0 + 2.0 / 3.0 * e;
  f.rho00 = 1.0 / 3.0 - 1.0 / 3.0 * e;
  f.rho22 = f.rho00;
  return f;
}

double gaussian_dephasing_equivalent(double t2, double a1) {
  if (!(t2 > 0)) throw ConfigError("gaussian_dephasing_equivalent: T2 must be > 0");
  if (a1 == 0)
    throw DomainError("gaussian_dephasing_equivalent: A1 = 0 (sweet spot), no finite sigma_x gives T2");
  return std::sqrt(2.0) / (std::abs(a1) * t2);
}

}  // namespace stirap
