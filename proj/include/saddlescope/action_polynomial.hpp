#ifndef SADDLESCOPE_ACTION_POLYNOMIAL_HPP
#define SADDLESCOPE_ACTION_POLYNOMIAL_HPP

#include <complex>
#include <vector>

#include "saddlescope/polynomial.hpp"

namespace saddlescope {

// Polynomial in the action integrals: sum over terms
//   kappa * I^{a_1} J_2^{a_2} .. J_d^{a_d} hbar^j.
// Reuses the nibble-packed Monomial with the first d slots holding the
// action exponents (I first, then the bath actions) and the hbar slot at
// 2*dof; the p-slots stay zero.
class ActionPolynomial {
 public:
  using Term = std::pair<Monomial, double>;

  ActionPolynomial() : dof_(1) {}
  explicit ActionPolynomial(int dof) : dof_(dof) { Monomial::check_dof(dof); }

  static ActionPolynomial from_terms(int dof, std::vector<Term> terms) {
    ActionPolynomial a(dof);
    a.terms_ = std::move(terms);
    a.canonicalize();
    return a;
  }

  static Monomial action_monomial(int dof, std::span<const int> exponents, int hbar_power) {
    Monomial m;
    for (int k = 0; k < dof; ++k) m.set_slot(dof, k, exponents[k]);
    m.set_slot(dof, 2 * dof, hbar_power);
    return m;
  }

  int dof() const { return dof_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  unsigned reactive_exp(const Monomial& m) const { return m.slot(dof_, 0); }
  unsigned bath_exp(const Monomial& m, int k) const { return m.slot(dof_, k); }  // k in 1..d-1
  unsigned hbar_exp(const Monomial& m) const { return m.slot(dof_, 2 * dof_); }

  double coefficient(std::span<const int> exponents, int hbar_power) const {
    Monomial key = action_monomial(dof_, exponents, hbar_power);
    for (const auto& [m, c] : terms_)
      if (m == key) return c;
    return 0.0;
  }

  ActionPolynomial& add_term(const Monomial& m, double c) {
    terms_.emplace_back(m, c);
    canonicalize();
    return *this;
  }

  ActionPolynomial without_hbar() const {
    ActionPolynomial out(dof_);
    for (const auto& t : terms_)
      if (hbar_exp(t.first) == 0) out.terms_.push_back(t);
    return out;
  }

  friend ActionPolynomial operator+(const ActionPolynomial& a, const ActionPolynomial& b) {
    if (a.dof_ != b.dof_) throw StructuralError("action polynomial dof mismatch");
    ActionPolynomial out(a.dof_);
    out.terms_ = a.terms_;
    out.terms_.insert(out.terms_.end(), b.terms_.begin(), b.terms_.end());
    out.canonicalize();
    return out;
  }
  friend ActionPolynomial operator-(const ActionPolynomial& a, const ActionPolynomial& b) {
    return a + b.scaled(-1.0);
  }
  ActionPolynomial scaled(double s) const {
    ActionPolynomial out(dof_);
    out.terms_.reserve(terms_.size());
    for (const auto& [m, c] : terms_) out.terms_.emplace_back(m, c * s);
    out.canonicalize();
    return out;
  }

  // Value at numeric actions; complex I supports the resonance substitution
  // I -> -i hbar (n_1 + 1/2).
  template <class TI>
  auto eval(TI reactive, std::span<const double> bath, double hbar) const {
    using Out = decltype(TI(0) * 0.0);
    Out sum(0);
    for (const auto& [m, c] : terms_) {
      Out v(c);
      for (unsigned e = reactive_exp(m); e > 0; --e) v *= reactive;
      for (int k = 1; k < dof_; ++k)
        for (unsigned e = bath_exp(m, k); e > 0; --e) v *= bath[k - 1];
      for (unsigned e = hbar_exp(m); e > 0; --e) v *= hbar;
      sum += v;
    }
    return sum;
  }

  ActionPolynomial partial_reactive() const {
    ActionPolynomial out(dof_);
    for (const auto& [m, c] : terms_) {
      unsigned e = reactive_exp(m);
      if (e == 0) continue;
      out.terms_.emplace_back(m.with_slot_delta(dof_, 0, -1), c * double(e));
    }
    out.canonicalize();
    return out;
  }
  ActionPolynomial partial_bath(int k) const {  // k in 1..d-1
    ActionPolynomial out(dof_);
    for (const auto& [m, c] : terms_) {
      unsigned e = bath_exp(m, k);
      if (e == 0) continue;
      out.terms_.emplace_back(m.with_slot_delta(dof_, k, -1), c * double(e));
    }
    out.canonicalize();
    return out;
  }

  // Substitute I = q_1 p_1, J_k = (q_k^2 + p_k^2)/2 to re-express the table
  // as a phase polynomial (kernel elements of ad_{H_2} by construction).
  PhasePolynomial expand_to_phase(int order) const {
    PhasePolynomial result(dof_, order);
    PhasePolynomial reactive =
        PhasePolynomial::q_var(dof_, order, 0) * PhasePolynomial::p_var(dof_, order, 0);
    std::vector<PhasePolynomial> bath;
    for (int k = 1; k < dof_; ++k) {
      PhasePolynomial qk = PhasePolynomial::q_var(dof_, order, k);
      PhasePolynomial pk = PhasePolynomial::p_var(dof_, order, k);
      bath.push_back(0.5 * (qk * qk + pk * pk));
    }
    for (const auto& [m, c] : terms_) {
      PhasePolynomial term = PhasePolynomial::constant(dof_, order, c);
      for (unsigned e = reactive_exp(m); e > 0; --e) term = term * reactive;
      for (int k = 1; k < dof_; ++k)
        for (unsigned e = bath_exp(m, k); e > 0; --e) term = term * bath[k - 1];
      unsigned j = hbar_exp(m);
      if (j > 0) {
        Monomial hb;
        hb.set_slot(dof_, 2 * dof_, static_cast<int>(j));
        term = term * PhasePolynomial::from_terms(dof_, order, {{hb, 1.0}});
      }
      result += term;
    }
    return result;
  }

  void canonicalize() {
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& x, const Term& y) { return x.first < y.first; });
    std::vector<Term> merged;
    for (const auto& t : terms_) {
      if (!merged.empty() && merged.back().first == t.first)
        merged.back().second += t.second;
      else
        merged.push_back(t);
    }
    double maxabs = 0;
    for (const auto& [m, c] : merged) maxabs = std::max(maxabs, std::abs(c));
    terms_.clear();
    for (const auto& t : merged)
      if (std::abs(t.second) > 1e-15 * maxabs && t.second != 0.0) terms_.push_back(t);
  }

 private:
  int dof_;
  std::vector<Term> terms_;
};

// Weyl ordering of an action symbol: rewrites sum kappa I^a prod J^b hbar^j
// in terms of operator products Ihat^a prod Jhat^b hbar^j using
//   Op[I^{n+1}] = Ihat Op[I^n] - (hbar/2)^2 n^2 Op[I^{n-1}],
//   Op[J^{n+1}] = Jhat Op[J^n] + (hbar/2)^2 n^2 Op[J^{n-1}].
// Substituting spectral values into the returned table evaluates the
// operator's action on product eigenstates.
ActionPolynomial weyl_order(const ActionPolynomial& symbol);

// Inverse basis change (operator-ordered table back to the Weyl symbol).
ActionPolynomial weyl_unorder(const ActionPolynomial& ordered);

}  // namespace saddlescope

#endif
