#include "doctest.h"

#include "oracles.hpp"
#include "stirap/errors.hpp"
#include "stirap/model3.hpp"

using namespace stirap;

namespace {

ThreeLevelDrived ideal(double omega0T = 20) { return {PulseParamsd::symmetric(omega0T, 0.6, 1.0), {}}; }

}  // namespace

TEST_CASE("pulse envelopes peak where expected") {
  const PulseParamsd p = PulseParamsd::symmetric(20, 0.6, 1.0, 1.5, 0.5);
  CHECK(pulse_envelopes(p.tau, p).pump == doctest::Approx(1.5 * 20).epsilon(1e-15));
  CHECK(pulse_envelopes(-p.tau, p).stokes == doctest::Approx(0.5 * 20).epsilon(1e-15));
  CHECK(p.stokes_peak() < p.pump_peak());
  CHECK(p.t_start == doctest::Approx(-4.6));
  // tails below exp(-16) at the window edge
  CHECK(pulse_envelopes(p.t_end, p).stokes < 20 * std::exp(-16.0) * (1 + 1e-12));
}

TEST_CASE("pulse symmetry with equal amplitudes") {
  const PulseParamsd p = PulseParamsd::symmetric(13, 0.7, 1.3);
  for (double t = -4; t <= 4; t += 0.37) CHECK(pulse_envelopes(t, p).pump == pulse_envelopes(-t, p).stokes);
}

TEST_CASE("pulse parameter validation") {
  PulseParamsd p = PulseParamsd::symmetric(20, 0.6, 1.0);
  CHECK_NOTHROW(p.validate());
  p.omega0 = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = PulseParamsd::symmetric(20, 0.6, 1.0);
  p.kappa_s = -1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = PulseParamsd::symmetric(20, 0.6, 1.0);
  p.t_end = 0.5;  // pump peak outside
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("detuning bookkeeping") {
  DetuningParamsd d{0.3, -0.2};
  CHECK(d.delta_s() == doctest::Approx(-0.5));
}

TEST_CASE("rwa hamiltonian structure") {
  ThreeLevelDrived d = ideal();
  d.detunings = {0.3, -0.7};
  for (double t : {-2.0, -0.6, 0.0, 0.6, 1.9}) {
    const Matrix3cd h = rwa_hamiltonian(t, d);
    const Envelopesd e = pulse_envelopes(t, d.pulses);
    CHECK((h - h.adjoint()).norm() == 0.0);
    CHECK(h(0, 0) == std::complex<double>(0));
    CHECK(h(1, 1).real() == 0.3);
    CHECK(h(2, 2).real() == -0.7);
    CHECK(h(2, 0).real() == e.pump / 2);
    CHECK(h(2, 1).real() == e.stokes / 2);
    CHECK(h(0, 1) == std::complex<double>(0));
    CHECK(h.trace().real() == doctest::Approx(-0.4).epsilon(1e-14));
  }
  ThreeLevelDrived off = ideal();
  CHECK(rwa_hamiltonian(Envelopesd{0, 0}, off.detunings).norm() == 0.0);
  const Matrix3cd at_peak = rwa_hamiltonian(off.pulses.tau, off);
  CHECK(at_peak(2, 0).real() == doctest::Approx(10).epsilon(1e-15));
  CHECK(at_peak(0, 2).real() == doctest::Approx(10).epsilon(1e-15));
}

TEST_CASE("dark state") {
  const double s = 1 / std::sqrt(2.0);
  const StateVectord a = dark_state(0.0, 3.0);
  CHECK(std::abs(a(0) - 1.0) < 1e-15);
  const StateVectord b = dark_state(2.0, 0.0);
  CHECK(std::abs(b(1) + 1.0) < 1e-15);
  const StateVectord c = dark_state(5.0, 5.0);
  CHECK(std::abs(c(0) - s) < 1e-15);
  CHECK(std::abs(c(1) + s) < 1e-15);
  CHECK_THROWS_AS(dark_state(0.0, 0.0), DomainError);

  ThreeLevelDrived d = ideal();
  for (double dp : {0.0, 0.4, -3.0}) {
    d.detunings = {0.0, dp};
    for (double t = -3; t <= 3; t += 0.25) {
      const Envelopesd e = pulse_envelopes(t, d.pulses);
      if (e.pump == 0 && e.stokes == 0) continue;
      const StateVectord dark = dark_state(e.pump, e.stokes);
      CHECK(dark(2) == std::complex<double>(0));
      CHECK((rwa_hamiltonian(t, d) * dark).norm() <= 1e-12 * (std::abs(dp) + d.pulses.omega0));
    }
  }
}

TEST_CASE("adiabatic spectrum reconstructs the hamiltonian") {
  ThreeLevelDrived d = ideal();
  d.detunings = {0.2 * 20, -0.2 * 20};
  for (double t = -4.6; t <= 4.6; t += 0.23) {
    const Matrix3cd h = rwa_hamiltonian(t, d);
    const AdiabaticSpectrumd s = adiabatic_spectrum(h);
    const Matrix3cd v = s.eigenvectors;
    CHECK((v.adjoint() * v - Matrix3cd::Identity()).norm() <= 1e-10);
    CHECK((h - v * s.eigenvalues.asDiagonal() * v.adjoint()).norm() <= 1e-10 * std::max(h.norm(), 1.0));
    CHECK(s.eigenvalues(0) <= s.eigenvalues(1));
    CHECK(s.eigenvalues(1) <= s.eigenvalues(2));
  }
}

TEST_CASE("adiabatic eigenvalues match characteristic polynomial roots") {
  ThreeLevelDrived d = ideal();
  d.detunings = {0.2 * 20, -0.2 * 20};
  for (double t : {-1.0, -0.3, 0.0, 0.4, 1.2}) {
    const Matrix3cd h = rwa_hamiltonian(t, d);
    const auto roots = oracle::symmetric_eigenvalues(h.real());
    const AdiabaticSpectrumd s = adiabatic_spectrum(t, d);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(s.eigenvalues(i) - roots[i]) <= 1e-10);
  }
}

TEST_CASE("adiabatic spectrum edge cases") {
  ThreeLevelDrived d = ideal();
  const AdiabaticSpectrumd zero = adiabatic_spectrum(rwa_hamiltonian(Envelopesd{0, 0}, d.detunings));
  CHECK(zero.eigenvalues.norm() == 0.0);

  // before the pulses the order follows the bare states (0, delta, delta_p)
  d.detunings = {0.5, -0.5};
  const AdiabaticSpectrumd early = adiabatic_spectrum(rwa_hamiltonian(Envelopesd{0, 0}, d.detunings));
  CHECK(early.eigenvalues(0) == -0.5);
  CHECK(std::abs(early.eigenvectors(2, 0)) == doctest::Approx(1.0));

  // on two-photon resonance one eigenvalue is exactly the dark state
  d.detunings = {0.0, 3.0};
  const double t = 0.2;
  const AdiabaticSpectrumd s = adiabatic_spectrum(t, d);
  const Envelopesd e = pulse_envelopes(t, d.pulses);
  const StateVectord dark = dark_state(e.pump, e.stokes);
  int zero_index = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(s.eigenvalues(i)) < std::abs(s.eigenvalues(zero_index))) zero_index = i;
  CHECK(std::abs(s.eigenvalues(zero_index)) <= 1e-12 * 20);
  CHECK(std::abs(dark.dot(s.eigenvectors.col(zero_index))) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("adiabatic track is continuous") {
  ThreeLevelDrived d = ideal();
  d.detunings = {0.3 * 20, 0.6 * 20};
  std::vector<double> times;
  for (int k = 0; k <= 4000; ++k) times.push_back(-4.6 + 9.2 * k / 4000);
  const auto track = adiabatic_track(times, d);
  // |dE/dt| <= ||dH/dt|| bounds jumps between neighbouring samples
  for (std::size_t k = 1; k < track.size(); ++k) {
    const double dh = (rwa_hamiltonian(times[k], d) - rwa_hamiltonian(times[k - 1], d)).norm();
    for (int i = 0; i < 3; ++i)
      CHECK(std::abs(track[k].eigenvalues(i) - track[k - 1].eigenvalues(i)) <= dh + 1e-12);
    // eigenvectors follow by overlap
    for (int i = 0; i < 3; ++i)
      CHECK(std::abs(track[k].eigenvectors.col(i).dot(track[k - 1].eigenvectors.col(i))) > 0.9);
  }
}
