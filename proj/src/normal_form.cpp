#include "saddlescope/normal_form.hpp"

#include <cmath>
#include <complex>
#include <string>

namespace saddlescope {

namespace {

using Complex = std::complex<double>;
using CMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

// q_k = (x_k + i y_k)/sqrt(2), p_k = (i x_k + y_k)/sqrt(2) on center pairs;
// the saddle pair stays real.
CMatrix complexify_matrix(int d) {
  CMatrix T = CMatrix::Zero(2 * d, 2 * d);
  const double s = 1.0 / std::sqrt(2.0);
  T(0, 0) = 1.0;
  T(d, d) = 1.0;
  for (int k = 1; k < d; ++k) {
    T(k, k) = s;
    T(k, d + k) = Complex(0, s);
    T(d + k, k) = Complex(0, s);
    T(d + k, d + k) = s;
  }
  return T;
}

// Inverse substitution x_k = (q_k - i p_k)/sqrt(2), y_k = (p_k - i q_k)/sqrt(2).
CMatrix realify_matrix(int d) {
  CMatrix T = CMatrix::Zero(2 * d, 2 * d);
  const double s = 1.0 / std::sqrt(2.0);
  T(0, 0) = 1.0;
  T(d, d) = 1.0;
  for (int k = 1; k < d; ++k) {
    T(k, k) = s;
    T(k, d + k) = Complex(0, -s);
    T(d + k, k) = Complex(0, -s);
    T(d + k, d + k) = s;
  }
  return T;
}

Complex diagonal_eigenvalue(const Monomial& m, int d, const LinearSpectrum& sp) {
  double re = sp.lambda * (static_cast<int>(m.p_exp(d, 0)) - static_cast<int>(m.q_exp(d, 0)));
  double im = 0;
  for (int k = 1; k < d; ++k)
    im += sp.omega[k - 1] *
          (static_cast<int>(m.p_exp(d, k)) - static_cast<int>(m.q_exp(d, k)));
  return {re, im};
}

bool is_diagonal_kernel(const Monomial& m, int d) {
  for (int k = 0; k < d; ++k)
    if (m.q_exp(d, k) != m.p_exp(d, k)) return false;
  return true;
}

NormalFormResult run_normal_form(const SystemSpec& spec, int N, BracketKind mode) {
  spec.validate();
  if (N < 2 || N > kMaxNormalFormOrder || N % 2 != 0)
    throw StructuralError("normal form order must be even and within [2, " +
                          std::to_string(kMaxNormalFormOrder) + "]");

  NormalFormResult result;
  result.dof = spec.dof;
  result.order = N;
  result.hbar_eff = spec.hbar_eff;
  result.quantum = mode == BracketKind::Quantum;

  EquilibriumResult eq = find_equilibrium(spec, Eigen::VectorXd::Zero(spec.dof));
  result.shift = eq.point;

  PhasePolynomial h = taylor_expand(spec, eq.point, N);
  double e0 = h.coefficient(Monomial{});

  auto [spectrum, map] = linearize(h.grade_part(2));
  spectrum.E0 = e0;
  result.spectrum = spectrum;
  result.map = map;

  const double resonance_tol = 1e-8 * (spectrum.lambda + spectrum.omega_sum());
  check_nonresonant(spectrum, 2 * N, resonance_tol);

  h = h.linear_substitute(map.M_inv);

  for (int n = 3; n <= N; ++n) {
    PhasePolynomial h_n = h.grade_part(n);
    auto [w_n, normalized] = solve_homological(h_n, spectrum, mode, resonance_tol);
    if (!w_n.empty()) h = lie_transform(h, w_n, mode);
    result.generators.push_back(std::move(w_n));
    (void)normalized;
  }

  ActionPolynomial table = kernel_to_actions(h);
  if (mode == BracketKind::Classical) {
    result.K_cnf = table;
  } else {
    result.K_qnf_symbol = table;
    result.K_qnf_op = weyl_order(table);
  }
  return result;
}

}  // namespace

void check_nonresonant(const LinearSpectrum& spectrum, int scan_bound, double tol) {
  const int n = static_cast<int>(spectrum.omega.size());
  if (n == 0) return;
  std::vector<int> m(n, 0);
  auto rec = [&](auto&& self, int idx, int budget) -> void {
    if (idx == n) {
      bool all_zero = true;
      double sum = 0;
      for (int k = 0; k < n; ++k) {
        if (m[k] != 0) all_zero = false;
        sum += m[k] * spectrum.omega[k];
      }
      if (!all_zero && std::abs(sum) < tol) {
        std::string combo;
        for (int k = 0; k < n; ++k)
          combo += (k ? ", " : "") + std::to_string(m[k]);
        throw SmallDivisorError("resonant frequencies: (" + combo +
                                ") . omega = " + std::to_string(sum));
      }
      return;
    }
    for (int v = -budget; v <= budget; ++v) {
      m[idx] = v;
      self(self, idx + 1, budget - std::abs(v));
      m[idx] = 0;
    }
  };
  rec(rec, 0, scan_bound);
}

std::pair<PhasePolynomial, PhasePolynomial> solve_homological(const PhasePolynomial& h_n,
                                                              const LinearSpectrum& spectrum,
                                                              BracketKind mode,
                                                              double resonance_tol) {
  const int d = h_n.dof();
  const int order = h_n.truncation_order();
  int grade = 0;
  if (!h_n.is_homogeneous(&grade))
    throw StructuralError("solve_homological: input must be homogeneous");
  if (h_n.empty())
    return {PhasePolynomial(d, order), PhasePolynomial(d, order)};
  if (grade < 3) throw StructuralError("solve_homological: grade must be >= 3");
  if (mode == BracketKind::Classical) {
    for (const auto& [m, c] : h_n.terms())
      if (m.hbar_exp(d) != 0)
        throw StructuralError("solve_homological: classical input carries hbar terms");
  }
  if (resonance_tol < 0) resonance_tol = 1e-8 * (spectrum.lambda + spectrum.omega_sum());

  ComplexPhasePolynomial ch = to_complex_coefficients(h_n).linear_substitute(complexify_matrix(d));

  std::vector<ComplexPhasePolynomial::Term> w_terms, k_terms;
  for (const auto& [m, c] : ch.terms()) {
    if (is_diagonal_kernel(m, d)) {
      k_terms.emplace_back(m, c);
      continue;
    }
    Complex eig = diagonal_eigenvalue(m, d, spectrum);
    if (std::abs(eig) < resonance_tol)
      throw SmallDivisorError("small divisor " + std::to_string(std::abs(eig)) +
                              " on monomial " + m.to_string(d));
    w_terms.emplace_back(m, c / eig);
  }
  const CMatrix R = realify_matrix(d);
  PhasePolynomial w = to_real_coefficients(
      ComplexPhasePolynomial::from_terms(d, order, std::move(w_terms)).linear_substitute(R));
  PhasePolynomial k = to_real_coefficients(
      ComplexPhasePolynomial::from_terms(d, order, std::move(k_terms)).linear_substitute(R));
  return {w, k};
}

ActionPolynomial kernel_to_actions(const PhasePolynomial& kernel) {
  const int d = kernel.dof();
  ComplexPhasePolynomial ch =
      to_complex_coefficients(kernel).linear_substitute(complexify_matrix(d));
  std::vector<ActionPolynomial::Term> terms;
  double max_offdiag = 0, max_imag = 0, scale = 0;
  for (const auto& [m, c] : ch.terms()) {
    scale = std::max(scale, std::abs(c));
    if (!is_diagonal_kernel(m, d)) {
      max_offdiag = std::max(max_offdiag, std::abs(c));
      continue;
    }
    // (x_k y_k)^a = (-i)^a J_k^a
    int total_center = 0;
    for (int k = 1; k < d; ++k) total_center += static_cast<int>(m.q_exp(d, k));
    static const Complex minus_i_pow[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
    Complex value = c * minus_i_pow[total_center % 4];
    max_imag = std::max(max_imag, std::abs(value.imag()));
    Monomial am;
    am.set_slot(d, 0, static_cast<int>(m.q_exp(d, 0)));
    for (int k = 1; k < d; ++k) am.set_slot(d, k, static_cast<int>(m.q_exp(d, k)));
    am.set_slot(d, 2 * d, static_cast<int>(m.hbar_exp(d)));
    terms.emplace_back(am, value.real());
  }
  if (max_offdiag > 1e-9 * std::max(1.0, scale))
    throw ValidityError("kernel_to_actions: input is not in the kernel of ad_{H_2}");
  if (max_imag > 1e-9 * std::max(1.0, scale))
    throw ValidityError("kernel_to_actions: action coefficients have imaginary residue");
  return ActionPolynomial::from_terms(d, std::move(terms));
}

NormalFormResult cnf(const SystemSpec& spec, int N) {
  return run_normal_form(spec, N, BracketKind::Classical);
}

NormalFormResult qnf(const SystemSpec& spec, int N) {
  NormalFormResult result = run_normal_form(spec, N, BracketKind::Quantum);
  NormalFormResult classical = run_normal_form(spec, N, BracketKind::Classical);
  result.K_cnf = classical.K_cnf;
  return result;
}

NfTransformer::NfTransformer(const NormalFormResult& result) : result_(result) {
  const int d = result.dof;
  const int N = result.order;
  std::vector<PhasePolynomial> coords;
  for (int i = 0; i < 2 * d; ++i) coords.push_back(PhasePolynomial::coordinate(d, N, i));
  for (const auto& w : result.generators) {
    std::vector<PhasePolynomial> fwd, bwd;
    if (w.empty()) {
      forward_maps_.push_back(fwd);
      backward_maps_.push_back(bwd);
      continue;
    }
    PhasePolynomial minus_w = w.scaled(-1.0);
    for (int i = 0; i < 2 * d; ++i) {
      // z_i after the time-one flow of W is exp(-ad_W) z_i; the inverse flow
      // carries the opposite sign.
      fwd.push_back(lie_transform(coords[i], minus_w, BracketKind::Classical));
      bwd.push_back(lie_transform(coords[i], w, BracketKind::Classical));
    }
    forward_maps_.push_back(std::move(fwd));
    backward_maps_.push_back(std::move(bwd));
  }
}

Eigen::VectorXd NfTransformer::to_normal_form(const Eigen::VectorXd& physical_point) const {
  const int d = result_.dof;
  Eigen::VectorXd u = result_.map.M * (physical_point - result_.shift);
  for (const auto& maps : forward_maps_) {
    if (maps.empty()) continue;
    Eigen::VectorXd next(2 * d);
    for (int i = 0; i < 2 * d; ++i) next[i] = maps[i].eval(u, result_.hbar_eff);
    u = next;
  }
  return u;
}

Eigen::VectorXd NfTransformer::from_normal_form(const Eigen::VectorXd& nf_point) const {
  const int d = result_.dof;
  Eigen::VectorXd u = nf_point;
  for (auto it = backward_maps_.rbegin(); it != backward_maps_.rend(); ++it) {
    if (it->empty()) continue;
    Eigen::VectorXd next(2 * d);
    for (int i = 0; i < 2 * d; ++i) next[i] = (*it)[i].eval(u, result_.hbar_eff);
    u = next;
  }
  return result_.map.M_inv * u + result_.shift;
}

Eigen::VectorXd nf_transform(const NormalFormResult& result, const Eigen::VectorXd& point,
                             NfDirection direction) {
  NfTransformer transformer(result);
  return direction == NfDirection::ToNormalForm ? transformer.to_normal_form(point)
                                                : transformer.from_normal_form(point);
}

}  // namespace saddlescope
