#include <doctest.h>

#include <cmath>
#include <numbers>

#include "saddlescope/complex_gamma.hpp"
#include "saddlescope/normal_form.hpp"
#include "saddlescope/scattering.hpp"
#include "saddlescope/systems.hpp"

using namespace saddlescope;

namespace {

constexpr double kPi = std::numbers::pi;

ActionPolynomial quadratic_table(int d, double lambda, const std::vector<double>& omega,
                                 double e0 = 0.0) {
  ActionPolynomial K(d);
  std::vector<int> exps(d, 0);
  K.add_term(ActionPolynomial::action_monomial(d, exps, 0), e0);
  exps[0] = 1;
  K.add_term(ActionPolynomial::action_monomial(d, exps, 0), lambda);
  exps[0] = 0;
  for (int k = 1; k < d; ++k) {
    exps[k] = 1;
    K.add_term(ActionPolynomial::action_monomial(d, exps, 0), omega[k - 1]);
    exps[k] = 0;
  }
  return K;
}

}  // namespace

TEST_CASE("gamma reflection identity on the critical line") {
  for (int i = 0; i <= 200; ++i) {
    double y = -50.0 + 0.5 * i;
    // |Gamma(1/2 + iy)|^2 cosh(pi y) / pi = 1
    std::complex<double> lg = log_gamma(std::complex<double>(0.5, y));
    double log_mod_sq = 2.0 * lg.real();
    // log cosh with overflow guard
    double ay = std::abs(kPi * y);
    double log_cosh = ay + std::log1p(std::exp(-2 * ay)) - std::log(2.0);
    double identity = std::exp(log_mod_sq + log_cosh - std::log(kPi));
    CHECK(identity == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("local S-matrix is unitary across the action range") {
  double hbar = 0.1;
  for (int i = 0; i <= 100; ++i) {
    double I = hbar * (-50.0 + 1.0 * i);
    Eigen::Matrix2cd S = smatrix_local(I, hbar);
    Eigen::Matrix2cd defect = S.adjoint() * S - Eigen::Matrix2cd::Identity();
    CHECK(defect.cwiseAbs().maxCoeff() < 1e-12);
    // |S12|^2 equals the transmission coefficient
    CHECK(std::norm(S(0, 1)) == doctest::Approx(transmission(I, hbar)).epsilon(1e-12));
  }
  // symmetric point
  Eigen::Matrix2cd S0 = smatrix_local(0.0, hbar);
  CHECK(std::norm(S0(0, 1)) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::norm(S0(0, 0)) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("transmission and reflection: exact complement, symmetry, limits") {
  double hbar = 0.1;
  CHECK(transmission(0.0, hbar) == 0.5);
  CHECK(transmission(3.0 * hbar, hbar) > 1.0 - 1e-8);
  CHECK(transmission(-3.0 * hbar, hbar) < 1e-8);

  for (int i = 0; i <= 100; ++i) {
    double I = hbar * (-50.0 + i);
    CHECK(transmission(I, hbar) + reflection(I, hbar) == 1.0);  // exact in fp
    CHECK(std::abs(transmission(-I, hbar) - reflection(I, hbar)) < 1e-15);
  }
  // monotone increasing
  double prev = -1;
  for (int i = 0; i <= 200; ++i) {
    double t = transmission(-0.5 + 0.005 * i, hbar);
    CHECK(t >= prev);
    prev = t;
  }
}

TEST_CASE("flux expectation: sign, value, algebraic identity") {
  double hbar = 0.1;
  CHECK(flux_expectation(0.0, hbar, FluxSide::Reactants) ==
        doctest::Approx(1.0 / (4 * kPi * hbar)).epsilon(1e-14));
  CHECK(flux_expectation(0.0, hbar, FluxSide::Products) ==
        doctest::Approx(-1.0 / (4 * kPi * hbar)).epsilon(1e-14));
  for (double I : {-0.2, -0.05, 0.0, 0.1, 0.7}) {
    double f = flux_expectation(I, hbar, FluxSide::Reactants);
    CHECK(std::abs(2 * kPi * hbar * std::abs(f) - transmission(I, hbar)) <
          1e-15 * std::max(1.0, transmission(I, hbar)));
  }
}

TEST_CASE("channel action: closed form for quadratic tables, monotone in E") {
  auto K = quadratic_table(3, 0.9, {1.1, 1.7}, 0.4);
  double hbar = 0.1;
  std::vector<int> n = {1, 2};
  double E = 1.3;
  double expected = (E - 0.4 - 1.1 * hbar * 1.5 - 1.7 * hbar * 2.5) / 0.9;
  CHECK(solve_channel_action(K, E, n, hbar) == doctest::Approx(expected).epsilon(1e-14));

  // anharmonic: residual below tolerance and strictly increasing in E
  std::vector<int> e2 = {2, 0, 0};
  K.add_term(ActionPolynomial::action_monomial(3, e2, 0), 0.08);
  double prev = -1e9;
  for (int i = 0; i < 20; ++i) {
    double e = 0.8 + 0.05 * i;
    double I = solve_channel_action(K, e, n, hbar);
    std::vector<double> J = {hbar * 1.5, hbar * 2.5};
    CHECK(std::abs(K.eval(I, std::span<const double>(J), hbar) - e) < 1e-12 * std::max(1.0, e));
    CHECK(I > prev);
    prev = I;
  }
}

TEST_CASE("crp: closed-form channel sum for a quadratic 2-DoF table") {
  // place E so the n2 = 0 channel has I = 0; higher channels close fast
  double lambda = 1.0, omega = 2.0, hbar = 0.1;
  auto K = quadratic_table(2, lambda, {omega});
  double E = omega * hbar * 0.5;  // I_0 = 0
  auto result = crp(K, E, hbar);
  double expected = 0.5;
  for (int n = 1; n < 60; ++n) {
    double I_n = (E - omega * hbar * (n + 0.5)) / lambda;
    expected += 1.0 / (1.0 + std::exp(-2 * kPi * I_n / hbar));
  }
  CHECK(result.value == doctest::Approx(expected).epsilon(1e-12));
  CHECK(result.channels.front().transmission == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("crp: d = 1 single channel and monotonicity in E") {
  SystemSpec spec;
  spec.dof = 1;
  spec.hbar_eff = 0.1;
  spec.potentials = {EckartPotential{1.0, 0.5, 5.0}};
  auto nf = qnf(spec, 6);
  double prev = -1;
  for (int i = 0; i <= 40; ++i) {
    double E = nf.spectrum.E0 - 0.1 + 0.005 * i;
    auto r = crp(nf.K_qnf_op, E, spec.hbar_eff);
    CHECK(r.channels.size() == 1);
    CHECK(r.value >= prev);
    prev = r.value;
  }
}

TEST_CASE("crp approaches the lattice count as hbar shrinks") {
  auto K = quadratic_table(2, 1.0, {std::sqrt(2.0)});
  double E = 0.5;
  for (double hbar : {0.1, 0.03, 0.01}) {
    double n_qnf = crp(K, E, hbar).value;
    // open-channel lattice count: I_n > 0
    int count = 0;
    for (int n = 0; n < 1000; ++n)
      if (E - std::sqrt(2.0) * hbar * (n + 0.5) > 0) ++count;
    // boundary shell: at most one channel can straddle the threshold
    CHECK(std::abs(n_qnf - count) <= 1.0);
  }
  // trend: relative deviation from the Weyl-limit count shrinks
  double dev_coarse = std::abs(crp(K, E, 0.1).value - E / (std::sqrt(2.0) * 0.1));
  double dev_fine = std::abs(crp(K, E, 0.01).value - E / (std::sqrt(2.0) * 0.01));
  CHECK(dev_fine <= dev_coarse + 0.5);
}

TEST_CASE("block S-matrix: unitarity, trace identity, closed channels") {
  auto K = quadratic_table(3, 0.9, {1.1, 1.7}, 0.0);
  double hbar = 0.1, E = 0.6;
  auto blocks = smatrix_full(K, E, hbar);
  REQUIRE(!blocks.empty());
  double trace = 0;
  for (const auto& [ch, S] : blocks) {
    CHECK((S.adjoint() * S - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    trace += std::norm(S(0, 1));
  }
  CHECK(trace == doctest::Approx(crp(K, E, hbar).value).epsilon(1e-12));

  // deep closed channel: |S12|^2 tiny
  Eigen::Matrix2cd S_closed = smatrix_local(-3.0 * hbar, hbar);
  CHECK(std::norm(S_closed(0, 1)) < 1e-8);
}

TEST_CASE("thermal rate: analytic kernels and linearity") {
  double beta = 2.0, qr = 3.0;
  double e0 = 0.5;
  // step function: k = e^{-beta e0} / (2 pi qr beta)
  auto step = [&](double E) { return E >= e0 ? 1.0 : 0.0; };
  double k_step = thermal_rate(step, 0.0, e0 + 25.0 / beta, beta, qr);
  CHECK(k_step == doctest::Approx(std::exp(-beta * e0) / (2 * kPi * qr * beta)).epsilon(1e-8));

  // constant from the physical lower limit: k = c / (2 pi qr beta)
  auto constant = [](double) { return 0.7; };
  double b = 30.0 / beta;
  double k_const = thermal_rate(constant, 0.0, b, beta, qr);
  CHECK(k_const == doctest::Approx(0.7 / (2 * kPi * qr * beta)).epsilon(1e-8));

  // linearity
  auto step2 = [&](double E) { return E >= 0.8 ? 1.0 : 0.0; };
  auto combo = [&](double E) { return 2.0 * step(E) + 3.0 * step2(E); };
  double k_combo = thermal_rate(combo, 0.0, b, beta, qr);
  double k_step_w = thermal_rate(step, 0.0, b, beta, qr);
  double k_step2_w = thermal_rate(step2, 0.0, b, beta, qr);
  CHECK(k_combo == doctest::Approx(2 * k_step_w + 3 * k_step2_w).epsilon(1e-12));

  // insufficient window: a constant curve truncated above the physical lower
  // limit leaves unaccounted mass in [0, e_min)
  CHECK_THROWS_AS(thermal_rate(constant, 1.0, b, beta, qr), ValidityError);
  // and a shallow left decay below 0 cannot beat the Boltzmann growth
  auto slow = [](double E) { return std::exp(0.1 * E); };
  CHECK_THROWS_AS(thermal_rate(slow, -5.0, 5.0, beta, qr), ValidityError);
}

TEST_CASE("resonances: quadratic closed form, ordering, lifetimes") {
  double lambda = 0.8, hbar = 0.1, e0 = 0.25;
  auto K = quadratic_table(3, lambda, {1.2, 1.9}, e0);
  std::vector<int> n_max = {2, 2, 2};
  auto table = resonances(K, hbar, n_max);
  REQUIRE(table.size() == 27);
  for (const auto& entry : table) {
    std::complex<double> expected(
        e0 + 1.2 * hbar * (entry.n[1] + 0.5) + 1.9 * hbar * (entry.n[2] + 0.5),
        -lambda * hbar * (entry.n[0] + 0.5));
    CHECK(std::abs(entry.energy - expected) < 1e-13);
    CHECK(entry.lifetime == doctest::Approx(hbar / std::abs(expected.imag())).epsilon(1e-12));
    CHECK(entry.valid);
  }
  // sorted by |Im|
  for (std::size_t i = 1; i < table.size(); ++i)
    CHECK(std::abs(table[i - 1].energy.imag()) <= std::abs(table[i].energy.imag()));
}

TEST_CASE("resonances: continuous deformation with the coupling strength") {
  SystemSpec base;
  base.dof = 3;
  base.hbar_eff = 0.1;
  base.potentials = {EckartPotential{1.0, 0.5, 5.0}, MorsePotential{1.0, 1.0},
                     MorsePotential{1.5, 1.0}};
  base.couplings = {KineticCoupling{0.0}};
  std::vector<int> n_max = {1, 1, 1};

  auto table0 = resonances(qnf(base, 6).K_qnf_op, 0.1, n_max);
  double prev_dist = 1e9;
  for (double eps : {0.2, 0.1, 0.05}) {
    base.couplings = {KineticCoupling{eps}};
    auto table_eps = resonances(qnf(base, 6).K_qnf_op, 0.1, n_max);
    double dist = 0;
    for (std::size_t i = 0; i < table0.size(); ++i) {
      // match by quantum numbers
      for (const auto& e : table_eps)
        if (e.n == table0[i].n) dist = std::max(dist, std::abs(e.energy - table0[i].energy));
    }
    CHECK(dist < prev_dist);
    prev_dist = dist;
  }
  CHECK(prev_dist < 0.05);  // eps = 0.05 already close to the uncoupled table
}

TEST_CASE("autocorrelation: normalization, decay rate, validity guard") {
  double lambda = 0.9, hbar = 0.01;
  auto K = quadratic_table(2, lambda, {1.4}, 0.0);
  std::vector<int> bath = {0};

  std::vector<double> t_grid;
  double lifetime = 2.0 / lambda;
  for (int i = 0; i <= 80; ++i) t_grid.push_back(i * lifetime / 8.0);
  auto samples = autocorrelation(K, hbar, bath, t_grid);

  CHECK(samples[0] == doctest::Approx(1.0).epsilon(1e-10));

  // beyond five lifetimes the log-slope is 2 Im E_0 / hbar = -lambda
  int i0 = 48, i1 = 72;  // 6 and 9 lifetimes
  double slope = std::log(samples[i1] / samples[i0]) / (t_grid[i1] - t_grid[i0]);
  CHECK(slope == doctest::Approx(-lambda).epsilon(0.01));

  // a positive-imaginary resonance in the sum is a validity error
  ActionPolynomial bad = quadratic_table(2, -0.5, {1.4}, 0.0);
  CHECK_THROWS_AS(autocorrelation(bad, hbar, bath, t_grid), ValidityError);
}

TEST_CASE("convergence radius: reference coefficient series, geometric series, edge cases") {
  std::vector<double> c = {0.161982, 1.193254, 14.90023, 378.7950, 1227.035};
  auto est = convergence_radius(c);
  REQUIRE(est.ratios.size() == 4);
  CHECK(est.estimate == doctest::Approx(14.90023 / 378.7950).epsilon(1e-12));
  CHECK(std::abs(est.estimate - 0.0393) < 0.02 * 0.0393 + 5e-5);

  // geometric coefficients r^{-n} give exactly r
  std::vector<double> geo;
  for (int n = 0; n < 6; ++n) geo.push_back(std::pow(0.25, -n));
  CHECK(convergence_radius(geo).estimate == doctest::Approx(0.25).epsilon(1e-12));

  std::vector<double> two = {3.0, 6.0};
  CHECK(convergence_radius(two).estimate == doctest::Approx(0.5).epsilon(1e-12));
  std::vector<double> one = {1.0};
  CHECK_THROWS_AS(convergence_radius(one), StructuralError);
  // ratios touching a zero coefficient are skipped
  std::vector<double> zeros = {1.0, 0.0, 2.0, 4.0};
  auto skipped = convergence_radius(zeros);
  CHECK(skipped.ratios.size() == 1);
  CHECK(skipped.estimate == doctest::Approx(0.5).epsilon(1e-12));
  std::vector<double> all_zero = {0.0, 0.0};
  CHECK_THROWS_AS(convergence_radius(all_zero), StructuralError);
}
