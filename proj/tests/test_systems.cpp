#include <doctest.h>

#include <cmath>

#include "saddlescope/systems.hpp"

using namespace saddlescope;

namespace {

SystemSpec emm_spec(double epsilon) {
  SystemSpec spec;
  spec.dof = 3;
  spec.hbar_eff = 0.1;
  spec.potentials = {EckartPotential{1.0, 0.5, 5.0}, MorsePotential{1.0, 1.0},
                     MorsePotential{1.5, 1.0}};
  spec.couplings = {KineticCoupling{epsilon}};
  return spec;
}

SystemSpec eckart_1d() {
  SystemSpec spec;
  spec.dof = 1;
  spec.hbar_eff = 0.1;
  spec.potentials = {EckartPotential{1.0, 0.5, 5.0}};
  return spec;
}

// Central finite differences of the closed-form potential, the independent
// cross-check for the series coefficients.  Richardson extrapolation brings
// the high orders to ~1e-7 accuracy, which plain double-precision stencils
// at a fixed small step cannot reach for the 4th derivative.
double fd_stencil(const SystemSpec& spec, int coord, double q0, int order, double h) {
  auto f = [&](double q) { return potential_value(spec, coord, q); };
  switch (order) {
    case 1: return (f(q0 + h) - f(q0 - h)) / (2 * h);
    case 2: return (f(q0 + h) - 2 * f(q0) + f(q0 - h)) / (h * h);
    case 3: return (f(q0 + 2 * h) - 2 * f(q0 + h) + 2 * f(q0 - h) - f(q0 - 2 * h)) / (2 * h * h * h);
    case 4:
      return (f(q0 + 2 * h) - 4 * f(q0 + h) + 6 * f(q0) - 4 * f(q0 - h) + f(q0 - 2 * h)) /
             (h * h * h * h);
  }
  return 0;
}

double fd_derivative(const SystemSpec& spec, int coord, double q0, int order) {
  const double h = 0.02;
  double coarse = fd_stencil(spec, coord, q0, order, h);
  double fine = fd_stencil(spec, coord, q0, order, h / 2);
  return (4.0 * fine - coarse) / 3.0;  // cancels the O(h^2) term
}

}  // namespace

TEST_CASE("potential values at reference points") {
  auto spec = emm_spec(0.0);
  // Eckart maximum value (A+B)^2/(4B) at q = 0
  CHECK(potential_value(spec, 0, 0.0) == doctest::Approx(1.5125).epsilon(1e-12));
  // Morse minimum -De at q = 0
  CHECK(potential_value(spec, 1, 0.0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(potential_value(spec, 2, 0.0) == doctest::Approx(-1.5).epsilon(1e-12));
  // Eckart asymptotics: 0 at -inf, A at +inf
  CHECK(potential_value(spec, 0, -40.0) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(potential_value(spec, 0, 40.0) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("taylor coefficients match finite differences and closed forms") {
  auto spec = emm_spec(0.0);
  Eigen::VectorXd center = Eigen::VectorXd::Zero(6);
  auto h = taylor_expand(spec, center, 4);

  for (int coord = 0; coord < 3; ++coord) {
    for (int order = 1; order <= 4; ++order) {
      Monomial m;
      m.set_slot(3, coord, order);
      double factorial = 1;
      for (int i = 2; i <= order; ++i) factorial *= i;
      double expected = fd_derivative(spec, coord, 0.0, order) / factorial;
      double got = h.coefficient(m);
      CHECK(std::abs(got - expected) < 1e-5 * std::max(1.0, std::abs(expected)));
    }
  }

  // Morse derivatives have the closed form De((-2a)^k - 2(-a)^k)
  for (int coord : {1, 2}) {
    double De = coord == 1 ? 1.0 : 1.5;
    for (int order = 1; order <= 4; ++order) {
      Monomial m;
      m.set_slot(3, coord, order);
      double factorial = 1;
      for (int i = 2; i <= order; ++i) factorial *= i;
      double deriv = De * (std::pow(-2.0, order) - 2.0 * std::pow(-1.0, order));
      CHECK(h.coefficient(m) == doctest::Approx(deriv / factorial).epsilon(1e-12));
    }
  }

  // Eckart barrier-top derivatives, frozen from the closed form
  Monomial e2, e3, e4;
  e2.set_slot(3, 0, 2);
  e3.set_slot(3, 0, 3);
  e4.set_slot(3, 0, 4);
  CHECK(h.coefficient(e2) == doctest::Approx(-0.6125625 / 2).epsilon(1e-12));
  CHECK(h.coefficient(e3) == doctest::Approx(0.18376875 / 6).epsilon(1e-12));
  CHECK(h.coefficient(e4) == doctest::Approx(1.169994375 / 24).epsilon(1e-12));

  // kinetic part is exact
  Monomial p1sq;
  p1sq.set_slot(3, 3, 2);
  CHECK(h.coefficient(p1sq) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("taylor expansion of a harmonic coordinate is exact at every order") {
  SystemSpec spec;
  spec.dof = 1;
  spec.hbar_eff = 0.1;
  spec.potentials = {HarmonicPotential{2.0}};
  auto h = taylor_expand(spec, Eigen::VectorXd::Zero(2), 8);
  Monomial q2, p2;
  q2.set_slot(1, 0, 2);
  p2.set_slot(1, 1, 2);
  CHECK(h.coefficient(q2) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(h.coefficient(p2) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(h.size() == 2);
}

TEST_CASE("taylor about a shifted center reproduces values") {
  auto spec = emm_spec(0.3);
  Eigen::VectorXd center(6);
  center << 0.2, -0.1, 0.15, 0.05, -0.02, 0.01;
  auto h = taylor_expand(spec, center, 6);
  // constant term equals H(center)
  CHECK(h.coefficient(Monomial{}) ==
        doctest::Approx(hamiltonian_value(spec, center)).epsilon(1e-12));
  // value of the Taylor polynomial near the center tracks H
  Eigen::VectorXd dz(6);
  dz << 0.01, -0.02, 0.005, 0.01, 0.015, -0.01;
  double approx = h.eval(dz, spec.hbar_eff);
  double exact = hamiltonian_value(spec, (center + dz).eval());
  CHECK(approx == doctest::Approx(exact).epsilon(1e-9));
}

TEST_CASE("find_equilibrium lands on the saddle") {
  auto spec = emm_spec(0.0);
  auto eq = find_equilibrium(spec, Eigen::VectorXd::Zero(3));
  CHECK(eq.point.cwiseAbs().maxCoeff() < 1e-10);
  CHECK(eq.gradient_norm < 1e-12);

  SystemSpec e1 = eckart_1d();
  Eigen::VectorXd guess(1);
  guess << 0.3;
  auto eq1 = find_equilibrium(e1, guess);
  CHECK(std::abs(eq1.point[0]) < 1e-10);

  // Morse minimum is an equilibrium too (non-saddle, flagged downstream)
  SystemSpec morse;
  morse.dof = 1;
  morse.hbar_eff = 0.1;
  morse.potentials = {MorsePotential{1.0, 1.0}};
  guess << 0.5;
  auto eqm = find_equilibrium(morse, guess);
  CHECK(std::abs(eqm.point[0]) < 1e-10);
  CHECK(eqm.hessian(0, 0) > 0);  // V'' > 0: a well, not a barrier
}

TEST_CASE("eckart oracle parameters") {
  auto p = eckart_oracle_params(1.0, 0.5, 5.0, 0.1, 1.5125);
  CHECK(p.C == doctest::Approx(0.1 * 0.1 / 8.0).epsilon(1e-14));
  CHECK(p.C > 0);
  CHECK(p.alpha == doctest::Approx(0.5 * std::sqrt(1.5125 / p.C)).epsilon(1e-14));
  CHECK(p.beta == doctest::Approx(0.5 * std::sqrt(1.0125 / p.C)).epsilon(1e-14));
  CHECK(p.delta == doctest::Approx(0.5 * std::sqrt((5.0 - p.C) / p.C)).epsilon(1e-14));
  CHECK_THROWS_AS(eckart_oracle_params(1.0, 0.5, 5.0, 0.1, 0.4), DomainError);
}

TEST_CASE("eckart exact transmission frozen value and limits") {
  // frozen: independent high-precision evaluation of the closed form at the
  // barrier-top energy for a=1, A=0.5, B=5, hbar=0.1
  CHECK(eckart_exact_transmission(1.0, 0.5, 5.0, 0.1, 1.5125) ==
        doctest::Approx(0.50620918656966807).epsilon(1e-12));

  CHECK(eckart_exact_transmission(1.0, 0.5, 5.0, 0.1, 0.5) == 0.0);
  CHECK(eckart_exact_transmission(1.0, 0.5, 5.0, 0.1, 0.5000001) < 1e-6);
  CHECK(eckart_exact_transmission(1.0, 0.5, 5.0, 0.1, 40.0) == doctest::Approx(1.0).epsilon(1e-8));

  // overflow-safe far into the semiclassical regime
  double t = eckart_exact_transmission(1.0, 0.5, 5.0, 0.001, 1.4);
  CHECK(std::isfinite(t));
  CHECK(t >= 0.0);
  CHECK(t <= 1.0);

  // monotone increasing on a grid
  double prev = -1;
  for (int i = 0; i <= 60; ++i) {
    double e = 0.6 + 0.03 * i;
    double ti = eckart_exact_transmission(1.0, 0.5, 5.0, 0.1, e);
    CHECK(ti >= prev);
    CHECK(ti <= 1.0);
    prev = ti;
  }
}

TEST_CASE("morse levels: frozen value, monotonicity, harmonic limit") {
  CHECK(morse_levels(1.0, 1.0, 0.1, 0) == doctest::Approx(-0.93053932188134525).epsilon(1e-12));

  // strictly increasing with shrinking spacing up to dissociation
  int count = morse_level_count(1.0, 1.0, 0.1);
  CHECK(count == 14);
  double prev_level = -2, prev_gap = 1e9;
  for (int n = 0; n < count; ++n) {
    double e = morse_levels(1.0, 1.0, 0.1, n);
    CHECK(e < 0.0);
    CHECK(e > prev_level);
    if (n > 0) {
      double gap = e - prev_level;
      CHECK(gap < prev_gap);
      prev_gap = gap;
    }
    prev_level = e;
  }
  CHECK_THROWS_AS(morse_levels(1.0, 1.0, 0.1, count), DomainError);

  // harmonic limit: E_n + De ~ hbar aM sqrt(2 De) (n + 1/2) within 5%
  for (int n = 0; n <= 2; ++n) {
    double e = morse_levels(1.0, 1.0, 0.01, n);
    double harmonic = 0.01 * std::sqrt(2.0) * (n + 0.5);
    CHECK(std::abs((e + 1.0 - harmonic) / harmonic) < 0.05);
  }
}

TEST_CASE("exact uncoupled CRP: thresholds, monotonicity, staircase") {
  auto spec = emm_spec(0.0);

  // below the lowest combined threshold every term vanishes
  double lowest = 0.5 + morse_levels(1.0, 1.0, 0.1, 0) + morse_levels(1.5, 1.0, 0.1, 0);
  CHECK(exact_crp_uncoupled(spec, lowest - 0.01) == 0.0);

  double prev = 0;
  for (int i = 0; i <= 80; ++i) {
    double e = -1.0 + i * (0.6 / 80);
    double n = exact_crp_uncoupled(spec, e);
    CHECK(n >= prev);
    prev = n;
  }

  // staircase step centers sit at barrier top + Morse threshold combinations
  double top = 1.5125;
  auto dN = [&](double e) {
    return (exact_crp_uncoupled(spec, e + 5e-4) - exact_crp_uncoupled(spec, e - 5e-4)) / 1e-3;
  };
  for (auto [n2, n3] : {std::pair{0, 0}, {0, 1}, {1, 0}, {1, 1}}) {
    double e_step = top + morse_levels(1.0, 1.0, 0.1, n2) + morse_levels(1.5, 1.0, 0.1, n3);
    // the slope at the predicted step dominates the slope a half-step away
    CHECK(dN(e_step) > 2.0 * dN(e_step - 0.08));
  }

  auto coupled = emm_spec(0.3);
  CHECK_THROWS_AS(exact_crp_uncoupled(coupled, 0.0), StructuralError);
  CHECK(has_uncoupled_crp_oracle(spec));
  CHECK(!has_uncoupled_crp_oracle(coupled));
}

TEST_CASE("spec validation rejects bad parameters") {
  auto spec = emm_spec(0.0);
  spec.hbar_eff = -1;
  CHECK_THROWS_AS(spec.validate(), StructuralError);

  auto bad_eckart = emm_spec(0.0);
  bad_eckart.potentials[0] = EckartPotential{1.0, 5.0, 0.5};  // B <= A
  CHECK_THROWS_AS(bad_eckart.validate(), StructuralError);

  auto wrong_count = emm_spec(0.0);
  wrong_count.potentials.pop_back();
  CHECK_THROWS_AS(wrong_count.validate(), StructuralError);
}
