#ifndef STIRAP_TESTS_ORACLES_HPP
#define STIRAP_TESTS_ORACLES_HPP

// Independent reference computations: nothing here calls the library's
// solvers.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "stirap/model3.hpp"

namespace oracle {

/// Roots of det(lambda - H) for a real symmetric 3x3 matrix, via the
/// trigonometric form of the cubic. Ascending.
inline std::array<double, 3> symmetric_eigenvalues(const Eigen::Matrix3d& a) {
  const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  const double q = a.trace() / 3;
  std::array<double, 3> e;
  if (p1 == 0) {
    e = {a(0, 0), a(1, 1), a(2, 2)};
  } else {
    const double p2 = std::pow(a(0, 0) - q, 2) + std::pow(a(1, 1) - q, 2) + std::pow(a(2, 2) - q, 2) + 2 * p1;
    const double p = std::sqrt(p2 / 6);
    const Eigen::Matrix3d b = (a - q * Eigen::Matrix3d::Identity()) / p;
    const double r = std::clamp(b.determinant() / 2, -1.0, 1.0);
    const double phi = std::acos(r) / 3;
    const double e1 = q + 2 * p * std::cos(phi);
    const double e3 = q + 2 * p * std::cos(phi + 2 * std::numbers::pi / 3);
    e = {e3, 3 * q - e1 - e3, e1};
  }
  std::sort(e.begin(), e.end());
  return e;
}

/// Classic fixed-step RK4 for i dpsi/dt = H(t) psi, reporting populations at
/// each grid point with `sub` equal steps per grid interval.
inline std::vector<Eigen::Vector3d> rk4_populations(const stirap::ThreeLevelDrived& d,
                                                    const std::vector<double>& grid, int sub) {
  using V = Eigen::Vector3cd;
  const std::complex<double> mi(0, -1);
  auto f = [&](double t, const V& y) -> V { return mi * (stirap::rwa_hamiltonian(t, d) * y); };
  V y(1, 0, 0);
  std::vector<Eigen::Vector3d> out;
  out.push_back(y.cwiseAbs2());
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double h = (grid[k + 1] - grid[k]) / sub;
    for (int s = 0; s < sub; ++s) {
      const double t = grid[k] + s * h;
      const V k1 = f(t, y);
      const V k2 = f(t + h / 2, y + h / 2 * k1);
      const V k3 = f(t + h / 2, y + h / 2 * k2);
      const V k4 = f(t + h, y + h * k3);
      y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    out.push_back(y.cwiseAbs2());
  }
  return out;
}

/// Dense Cooper pair box Hamiltonian in the charge basis, energies only.
inline Eigen::VectorXd cpb_dense_energies(double J, double qg, int n_max) {
  const int n = 2 * n_max + 1;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double charge = k - n_max;
    h(k, k) = (qg - charge) * (qg - charge);
    if (k + 1 < n) h(k, k + 1) = h(k + 1, k) = -J / 2;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  return es.eigenvalues();
}

struct DenseCpb {
  Eigen::VectorXd energies;  // absolute
  Eigen::MatrixXd n;         // <i|n|j>, lowest levels
};

inline DenseCpb cpb_dense(double J, double qg, int n_max, int levels = 3) {
  const int n = 2 * n_max + 1;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd charge = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    charge(k, k) = k - n_max;
    h(k, k) = (qg - charge(k, k)) * (qg - charge(k, k));
    if (k + 1 < n) h(k, k + 1) = h(k + 1, k) = -J / 2;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  const Eigen::MatrixXd v = es.eigenvectors().leftCols(levels);
  return {es.eigenvalues().head(levels), v.transpose() * charge * v};
}

/// Level energies relative to the ground state, and their central first and
/// second differences in q_g, Richardson-extrapolated over h and h/2.
struct CpbDerivatives {
  Eigen::VectorXd rel;
  Eigen::VectorXd first;
  Eigen::VectorXd second;
};

inline CpbDerivatives cpb_finite_differences(double J, double qg, int n_max, double h) {
  auto rel = [&](double q) {
    const Eigen::VectorXd e = cpb_dense_energies(J, q, n_max).head(3);
    return Eigen::VectorXd(e.array() - e(0));
  };
  const Eigen::VectorXd e0 = rel(qg);
  auto first = [&](double s) { return Eigen::VectorXd((rel(qg + s) - rel(qg - s)) / (2 * s)); };
  auto second = [&](double s) { return Eigen::VectorXd((rel(qg + s) - 2 * e0 + rel(qg - s)) / (s * s)); };
  return {e0, (4 * first(h / 2) - first(h)) / 3, (4 * second(h / 2) - second(h)) / 3};
}

}  // namespace oracle

#endif
