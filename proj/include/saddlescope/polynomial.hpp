#ifndef SADDLESCOPE_POLYNOMIAL_HPP
#define SADDLESCOPE_POLYNOMIAL_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "saddlescope/errors.hpp"
#include "saddlescope/monomial.hpp"

namespace saddlescope {

inline double coeff_abs(double c) { return std::abs(c); }
inline double coeff_abs(const std::complex<double>& c) { return std::abs(c); }

inline bool coeff_less(double a, double b) { return a < b; }
inline bool coeff_less(const std::complex<double>& a, const std::complex<double>& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

// Sparse graded polynomial over (q, p, hbar) with scalar coefficients.
// Canonical form is maintained after every operation: terms sorted by
// monomial key, no duplicates, grades above truncation_order dropped, and
// coefficients below 1e-15 relative to the largest magnitude pruned.
template <class Scalar>
class PolynomialT {
 public:
  using Term = std::pair<Monomial, Scalar>;
  static constexpr double kPruneRel = 1e-15;

  PolynomialT() : dof_(1), order_(0) {}

  PolynomialT(int dof, int truncation_order) : dof_(dof), order_(truncation_order) {
    Monomial::check_dof(dof);
    if (truncation_order < 0 || truncation_order > 15)
      throw StructuralError("truncation_order must be in [0, 15]");
  }

  static PolynomialT zero(int dof, int order) { return PolynomialT(dof, order); }

  static PolynomialT constant(int dof, int order, Scalar value) {
    PolynomialT p(dof, order);
    p.terms_.emplace_back(Monomial{}, value);
    p.canonicalize();
    return p;
  }

  // Coordinate slots 0..2*dof-1 are q_1..q_d, p_1..p_d; slot 2*dof is hbar.
  static PolynomialT coordinate(int dof, int order, int slot) {
    PolynomialT p(dof, order);
    Monomial m;
    m.set_slot(dof, slot, 1);
    p.terms_.emplace_back(m, Scalar(1));
    p.canonicalize();
    return p;
  }
  static PolynomialT q_var(int dof, int order, int k) { return coordinate(dof, order, k); }
  static PolynomialT p_var(int dof, int order, int k) { return coordinate(dof, order, dof + k); }

  static PolynomialT from_terms(int dof, int order, std::vector<Term> terms) {
    PolynomialT p(dof, order);
    p.terms_ = std::move(terms);
    p.canonicalize();
    return p;
  }

  int dof() const { return dof_; }
  int truncation_order() const { return order_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  Scalar coefficient(const Monomial& m) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                               [](const Term& t, const Monomial& key) { return t.first < key; });
    if (it != terms_.end() && it->first == m) return it->second;
    return Scalar(0);
  }

  double max_abs_coefficient() const {
    double m = 0;
    for (const auto& [mono, c] : terms_) m = std::max(m, coeff_abs(c));
    return m;
  }

  int min_grade() const {
    int g = order_ + 1;
    for (const auto& [mono, c] : terms_) g = std::min(g, mono.grade(dof_));
    return g;
  }
  int max_grade() const {
    int g = 0;
    for (const auto& [mono, c] : terms_) g = std::max(g, mono.grade(dof_));
    return g;
  }
  int max_qp_degree() const {
    int g = 0;
    for (const auto& [mono, c] : terms_) g = std::max(g, mono.qp_degree(dof_));
    return g;
  }

  bool is_homogeneous(int* grade_out = nullptr) const {
    if (terms_.empty()) return true;
    int g = terms_.front().first.grade(dof_);
    for (const auto& [mono, c] : terms_)
      if (mono.grade(dof_) != g) return false;
    if (grade_out) *grade_out = g;
    return true;
  }

  PolynomialT grade_part(int s) const {
    PolynomialT out(dof_, order_);
    for (const auto& t : terms_)
      if (t.first.grade(dof_) == s) out.terms_.push_back(t);
    return out;  // already canonical: sorted subset of canonical terms
  }

  // Retarget the truncation order, dropping any terms that no longer fit.
  PolynomialT truncated(int new_order) const {
    PolynomialT out(dof_, new_order);
    for (const auto& t : terms_)
      if (t.first.grade(dof_) <= new_order) out.terms_.push_back(t);
    return out;
  }

  // Delete all terms carrying hbar (the classical part of a symbol).
  PolynomialT without_hbar() const {
    PolynomialT out(dof_, order_);
    for (const auto& t : terms_)
      if (t.first.hbar_exp(dof_) == 0) out.terms_.push_back(t);
    return out;
  }

  PolynomialT& operator+=(const PolynomialT& other) {
    check_compatible(other);
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    canonicalize();
    return *this;
  }
  PolynomialT& operator-=(const PolynomialT& other) { return *this += other.scaled(Scalar(-1)); }

  friend PolynomialT operator+(PolynomialT a, const PolynomialT& b) { return a += b; }
  friend PolynomialT operator-(PolynomialT a, const PolynomialT& b) { return a -= b; }

  PolynomialT scaled(Scalar s) const {
    PolynomialT out(dof_, order_);
    out.terms_.reserve(terms_.size());
    for (const auto& [mono, c] : terms_) out.terms_.emplace_back(mono, c * s);
    out.canonicalize();
    return out;
  }
  friend PolynomialT operator*(Scalar s, const PolynomialT& p) { return p.scaled(s); }

  friend PolynomialT operator*(const PolynomialT& a, const PolynomialT& b) {
    a.check_compatible(b);
    PolynomialT out(a.dof_, a.order_);
    std::unordered_map<std::uint64_t, Scalar> acc;
    acc.reserve(a.size() + b.size());
    accumulate_product(acc, a, b, Scalar(1), 0);
    out.assign_from_accumulator(acc);
    return out;
  }

  // d/d(slot): slot < 2*dof differentiates a phase variable, slot == 2*dof
  // differentiates hbar.
  PolynomialT derivative(int slot) const {
    PolynomialT out(dof_, order_);
    out.terms_.reserve(terms_.size());
    for (const auto& [mono, c] : terms_) {
      unsigned e = mono.slot(dof_, slot);
      if (e == 0) continue;
      out.terms_.emplace_back(mono.with_slot_delta(dof_, slot, -1), c * Scalar(double(e)));
    }
    out.canonicalize();
    return out;
  }

  // Substitute each phase variable z_i -> sum_j A(i,j) z_j (hbar untouched).
  template <class MatScalar>
  PolynomialT<decltype(Scalar() * MatScalar())> linear_substitute(
      const Eigen::Matrix<MatScalar, Eigen::Dynamic, Eigen::Dynamic>& A) const {
    using Out = decltype(Scalar() * MatScalar());
    const int n = 2 * dof_;
    if (A.rows() != n || A.cols() != n)
      throw StructuralError("linear_substitute: matrix must be 2*dof x 2*dof");

    // Powers of each substituted variable, built on demand.
    std::vector<std::vector<PolynomialT<Out>>> powers(n);
    auto var_power = [&](int i, unsigned e) -> const PolynomialT<Out>& {
      auto& cache = powers[i];
      if (cache.empty()) {
        cache.push_back(PolynomialT<Out>::constant(dof_, order_, Out(1)));
        PolynomialT<Out> lin(dof_, order_);
        std::vector<typename PolynomialT<Out>::Term> lin_terms;
        for (int j = 0; j < n; ++j) {
          Monomial m;
          m.set_slot(dof_, j, 1);
          lin_terms.emplace_back(m, Out(A(i, j)));
        }
        lin = PolynomialT<Out>::from_terms(dof_, order_, std::move(lin_terms));
        cache.push_back(lin);
      }
      while (cache.size() <= e) cache.push_back(cache.back() * cache[1]);
      return cache[e];
    };

    std::vector<typename PolynomialT<Out>::Term> gathered;
    for (const auto& [mono, c] : terms_) {
      PolynomialT<Out> term = PolynomialT<Out>::constant(dof_, order_, Out(c));
      for (int i = 0; i < n; ++i) {
        unsigned e = mono.slot(dof_, i);
        if (e > 0) term = term * var_power(i, e);
      }
      unsigned j = mono.hbar_exp(dof_);
      if (j > 0) {
        Monomial hb;
        hb.set_slot(dof_, 2 * dof_, static_cast<int>(j));
        PolynomialT<Out> hpoly = PolynomialT<Out>::from_terms(dof_, order_, {{hb, Out(1)}});
        term = term * hpoly;
      }
      gathered.insert(gathered.end(), term.terms().begin(), term.terms().end());
    }
    return PolynomialT<Out>::from_terms(dof_, order_, std::move(gathered));
  }

  // Substitute z -> z + c (expansion about a shifted origin).
  PolynomialT shift(const Eigen::VectorXd& c) const {
    const int n = 2 * dof_;
    if (c.size() != n) throw StructuralError("shift: offset must have length 2*dof");
    std::vector<std::vector<PolynomialT>> powers(n);
    auto shifted_power = [&](int i, unsigned e) -> const PolynomialT& {
      auto& cache = powers[i];
      if (cache.empty()) {
        cache.push_back(PolynomialT::constant(dof_, order_, Scalar(1)));
        PolynomialT lin = PolynomialT::coordinate(dof_, order_, i);
        if (c[i] != 0.0) lin += PolynomialT::constant(dof_, order_, Scalar(c[i]));
        cache.push_back(lin);
      }
      while (cache.size() <= e) cache.push_back(cache.back() * cache[1]);
      return cache[e];
    };
    std::vector<Term> gathered;
    for (const auto& [mono, coeff] : terms_) {
      PolynomialT term = PolynomialT::constant(dof_, order_, coeff);
      for (int i = 0; i < n; ++i) {
        unsigned e = mono.slot(dof_, i);
        if (e > 0) term = term * shifted_power(i, e);
      }
      unsigned j = mono.hbar_exp(dof_);
      if (j > 0) {
        Monomial hb;
        hb.set_slot(dof_, 2 * dof_, static_cast<int>(j));
        term = term * PolynomialT::from_terms(dof_, order_, {{hb, Scalar(1)}});
      }
      gathered.insert(gathered.end(), term.terms().begin(), term.terms().end());
    }
    return PolynomialT::from_terms(dof_, order_, std::move(gathered));
  }

  template <class Point>
  auto eval(const Point& z, double hbar) const {
    using Out = decltype(Scalar() * typename Point::Scalar());
    const int n = 2 * dof_;
    if (z.size() != n) throw StructuralError("eval: point must have length 2*dof");
    Out sum(0);
    for (const auto& [mono, c] : terms_) {
      Out v(c);
      for (int i = 0; i < n; ++i)
        for (unsigned e = mono.slot(dof_, i); e > 0; --e) v *= z[i];
      for (unsigned e = mono.hbar_exp(dof_); e > 0; --e) v *= hbar;
      sum += v;
    }
    return sum;
  }

  // Exposed for bracket kernels: fused multiply-accumulate of a*b into a raw
  // accumulator, with an extra hbar power and grade-aware truncation.
  static void accumulate_product(std::unordered_map<std::uint64_t, Scalar>& acc,
                                 const PolynomialT& a, const PolynomialT& b, Scalar prefactor,
                                 int extra_hbar) {
    const int dof = a.dof_;
    const int order = a.order_;
    std::vector<int> grade_b(b.terms_.size());
    for (std::size_t i = 0; i < b.terms_.size(); ++i)
      grade_b[i] = b.terms_[i].first.grade(dof);
    Monomial hb;
    if (extra_hbar > 0) hb.set_slot(dof, 2 * dof, extra_hbar);
    for (const auto& [ma, ca] : a.terms_) {
      const int ga = ma.grade(dof) + 2 * extra_hbar;
      const Scalar cpa = ca * prefactor;
      for (std::size_t i = 0; i < b.terms_.size(); ++i) {
        if (ga + grade_b[i] > order) continue;
        acc[ma.times(b.terms_[i].first).times(hb).key()] += cpa * b.terms_[i].second;
      }
    }
  }

  void assign_from_accumulator(const std::unordered_map<std::uint64_t, Scalar>& acc) {
    terms_.clear();
    terms_.reserve(acc.size());
    for (const auto& [key, c] : acc) terms_.emplace_back(Monomial::from_key(key), c);
    canonicalize();
  }

  // Sort, merge duplicates, truncate and prune.  Idempotent: applying it to
  // an already canonical polynomial leaves the term vector bit-identical.
  void canonicalize() {
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& x, const Term& y) { return x.first < y.first; });
    std::vector<Term> merged;
    merged.reserve(terms_.size());
    for (const auto& t : terms_) {
      if (!merged.empty() && merged.back().first == t.first)
        merged.back().second += t.second;
      else
        merged.push_back(t);
    }
    double maxabs = 0;
    for (const auto& [mono, c] : merged) maxabs = std::max(maxabs, coeff_abs(c));
    const double floor_abs = kPruneRel * maxabs;
    terms_.clear();
    for (const auto& t : merged) {
      if (t.first.grade(dof_) > order_) continue;
      if (coeff_abs(t.second) <= floor_abs || t.second == Scalar(0)) continue;
      terms_.push_back(t);
    }
  }

  // Total order on canonical polynomials: lexicographic over (key, coefficient)
  // pairs, shorter prefix first.  Used to orient antisymmetric operations.
  static int compare(const PolynomialT& a, const PolynomialT& b) {
    const std::size_t n = std::min(a.terms_.size(), b.terms_.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (a.terms_[i].first < b.terms_[i].first) return -1;
      if (b.terms_[i].first < a.terms_[i].first) return 1;
      if (coeff_less(a.terms_[i].second, b.terms_[i].second)) return -1;
      if (coeff_less(b.terms_[i].second, a.terms_[i].second)) return 1;
    }
    if (a.terms_.size() != b.terms_.size()) return a.terms_.size() < b.terms_.size() ? -1 : 1;
    return 0;
  }

  void check_compatible(const PolynomialT& other) const {
    if (dof_ != other.dof_)
      throw StructuralError("dof mismatch: " + std::to_string(dof_) + " vs " +
                            std::to_string(other.dof_));
    if (order_ != other.order_)
      throw StructuralError("truncation_order mismatch: " + std::to_string(order_) + " vs " +
                            std::to_string(other.order_));
  }

 private:
  int dof_;
  int order_;
  std::vector<Term> terms_;
};

using PhasePolynomial = PolynomialT<double>;
using ComplexPhasePolynomial = PolynomialT<std::complex<double>>;

inline ComplexPhasePolynomial to_complex_coefficients(const PhasePolynomial& p) {
  std::vector<ComplexPhasePolynomial::Term> terms;
  terms.reserve(p.size());
  for (const auto& [m, c] : p.terms()) terms.emplace_back(m, std::complex<double>(c, 0.0));
  return ComplexPhasePolynomial::from_terms(p.dof(), p.truncation_order(), std::move(terms));
}

// Real part of a nominally real complex polynomial.  Throws if the imaginary
// residue exceeds `imag_tol` relative to the real scale.
inline PhasePolynomial to_real_coefficients(const ComplexPhasePolynomial& p,
                                            double imag_tol = 1e-9) {
  double max_im = 0, max_re = 0;
  std::vector<PhasePolynomial::Term> terms;
  terms.reserve(p.size());
  for (const auto& [m, c] : p.terms()) {
    max_im = std::max(max_im, std::abs(c.imag()));
    max_re = std::max(max_re, std::abs(c.real()));
    terms.emplace_back(m, c.real());
  }
  if (max_im > imag_tol * std::max(1.0, max_re))
    throw ValidityError("complex polynomial has non-negligible imaginary residue");
  return PhasePolynomial::from_terms(p.dof(), p.truncation_order(), std::move(terms));
}

}  // namespace saddlescope

#endif
