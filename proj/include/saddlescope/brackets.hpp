#ifndef SADDLESCOPE_BRACKETS_HPP
#define SADDLESCOPE_BRACKETS_HPP

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "saddlescope/polynomial.hpp"

namespace saddlescope {

enum class BracketKind { Classical, Quantum };

// {A, B} = sum_j (dA/dq_j dB/dp_j - dA/dp_j dB/dq_j)
// Both brackets orient their arguments canonically and negate, so that
// bracket(a, b) + bracket(b, a) cancels term by term in floating point.
template <class Scalar>
PolynomialT<Scalar> poisson_bracket(const PolynomialT<Scalar>& a, const PolynomialT<Scalar>& b) {
  a.check_compatible(b);
  int rel = PolynomialT<Scalar>::compare(a, b);
  if (rel == 0) return PolynomialT<Scalar>(a.dof(), a.truncation_order());
  if (rel > 0) return poisson_bracket(b, a).scaled(Scalar(-1));
  const int d = a.dof();
  std::unordered_map<std::uint64_t, Scalar> acc;
  for (int j = 0; j < d; ++j) {
    PolynomialT<Scalar>::accumulate_product(acc, a.derivative(j), b.derivative(d + j), Scalar(1),
                                            0);
    PolynomialT<Scalar>::accumulate_product(acc, a.derivative(d + j), b.derivative(j), Scalar(-1),
                                            0);
  }
  PolynomialT<Scalar> out(a.dof(), a.truncation_order());
  out.assign_from_accumulator(acc);
  return out;
}

namespace detail {

// Enumerates multi-index pairs (mu, nu) over d coordinate pairs with
// |mu| + |nu| = m, invoking fn(mu, nu, multinomial m!/(mu! nu!)).
template <class Fn>
void for_each_bidiff_split(int d, int m, Fn&& fn) {
  std::vector<int> mu(d, 0), nu(d, 0);
  // Walk the 2d exponent slots recursively, tracking the running multinomial.
  auto rec = [&](auto&& self, int slot, int remaining, double multinomial) -> void {
    if (slot == 2 * d) {
      if (remaining == 0) fn(mu, nu, multinomial);
      return;
    }
    int* target = slot < d ? &mu[slot] : &nu[slot - d];
    double binom = 1.0;
    int placed_before = m - remaining;
    for (int e = 0; e <= remaining; ++e) {
      if (e > 0) binom = binom * double(placed_before + e) / double(e);
      *target = e;
      self(self, slot + 1, remaining - e, multinomial * binom);
      *target = 0;
    }
  };
  rec(rec, 0, m, 1.0);
}

template <class Scalar>
const PolynomialT<Scalar>& mixed_derivative(const PolynomialT<Scalar>& base,
                                            std::unordered_map<std::uint64_t, PolynomialT<Scalar>>& cache,
                                            const std::vector<int>& q_orders,
                                            const std::vector<int>& p_orders) {
  const int d = base.dof();
  std::uint64_t key = 0;
  for (int k = 0; k < d; ++k) key = key * 16 + static_cast<std::uint64_t>(q_orders[k]);
  for (int k = 0; k < d; ++k) key = key * 16 + static_cast<std::uint64_t>(p_orders[k]);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  PolynomialT<Scalar> result = base;
  for (int k = 0; k < d; ++k)
    for (int e = 0; e < q_orders[k]; ++e) result = result.derivative(k);
  for (int k = 0; k < d; ++k)
    for (int e = 0; e < p_orders[k]; ++e) result = result.derivative(d + k);
  return cache.emplace(key, std::move(result)).first->second;
}

}  // namespace detail

// Moyal bracket via the sine series expanded term by term,
//   {A, B}_M = sum_k (-1)^k hbar^{2k} / (4^k (2k+1)!) D^{2k+1}(A, B),
// where D^m(A, B) = sum_{|mu|+|nu|=m} m!/(mu! nu!) (-1)^{|nu|}
//                   (d_q^mu d_p^nu A)(d_p^mu d_q^nu B).
// The series terminates because the bidifferential order m = 2k+1 cannot
// exceed the (q,p)-degree of either argument.  hbar enters symbolically as
// the monomial exponent j, so the result reduces to the Poisson bracket when
// the j > 0 terms are deleted.
template <class Scalar>
PolynomialT<Scalar> moyal_bracket(const PolynomialT<Scalar>& a, const PolynomialT<Scalar>& b) {
  a.check_compatible(b);
  int rel = PolynomialT<Scalar>::compare(a, b);
  if (rel == 0) return PolynomialT<Scalar>(a.dof(), a.truncation_order());
  if (rel > 0) return moyal_bracket(b, a).scaled(Scalar(-1));
  const int d = a.dof();
  const int max_m = std::min(a.max_qp_degree(), b.max_qp_degree());
  std::unordered_map<std::uint64_t, Scalar> acc;
  std::unordered_map<std::uint64_t, PolynomialT<Scalar>> da_cache, db_cache;
  double inv_factorial = 1.0;  // 1/(2k+1)! running value
  for (int m = 1, k = 0; m <= max_m; m += 2, ++k) {
    if (k > 0) inv_factorial /= double(2 * k) * double(2 * k + 1);
    const double sign_k = (k % 2 == 0) ? 1.0 : -1.0;
    const double prefactor = sign_k * inv_factorial / std::pow(4.0, k);
    detail::for_each_bidiff_split(d, m, [&](const std::vector<int>& mu, const std::vector<int>& nu,
                                            double multinomial) {
      int abs_nu = 0;
      for (int v : nu) abs_nu += v;
      const auto& da = detail::mixed_derivative(a, da_cache, mu, nu);
      if (da.empty()) return;
      const auto& db = detail::mixed_derivative(b, db_cache, nu, mu);
      if (db.empty()) return;
      const double sign_nu = (abs_nu % 2 == 0) ? 1.0 : -1.0;
      PolynomialT<Scalar>::accumulate_product(acc, da, db,
                                              Scalar(prefactor * multinomial * sign_nu), 2 * k);
    });
  }
  PolynomialT<Scalar> out(a.dof(), a.truncation_order());
  out.assign_from_accumulator(acc);
  return out;
}

template <class Scalar>
PolynomialT<Scalar> bracket(const PolynomialT<Scalar>& a, const PolynomialT<Scalar>& b,
                            BracketKind kind) {
  return kind == BracketKind::Classical ? poisson_bracket(a, b) : moyal_bracket(a, b);
}

// Truncated Lie transform exp(ad_w) h = sum_k ad_w^k h / k!.  For a
// homogeneous generator of grade n >= 3 each bracket raises the grade by
// n - 2, so truncation terminates the sum exactly; per output grade s this
// reproduces the floor(s/(n-2))-indexed sum.  Grade-2 generators shift no
// grades and are summed to numerical convergence instead.
template <class Scalar>
PolynomialT<Scalar> lie_transform(const PolynomialT<Scalar>& h, const PolynomialT<Scalar>& w,
                                  BracketKind kind) {
  h.check_compatible(w);
  int n = 0;
  if (!w.is_homogeneous(&n))
    throw StructuralError("lie_transform: generator must be homogeneous");
  if (w.empty()) return h;
  if (n < 2) throw StructuralError("lie_transform: generator grade must be >= 2");

  PolynomialT<Scalar> result = h;
  PolynomialT<Scalar> term = h;
  const double scale = std::max(1.0, h.max_abs_coefficient());
  for (int k = 1; k <= 400; ++k) {
    term = bracket(w, term, kind);
    if (term.empty()) return result;
    term = (Scalar(1.0 / k)) * term;
    result += term;
    if (n == 2 && term.max_abs_coefficient() < 1e-18 * scale) return result;
  }
  if (n == 2)
    throw ConvergenceError("lie_transform: grade-2 generator series did not converge");
  return result;  // unreachable for n >= 3: grade growth empties the term
}

}  // namespace saddlescope

#endif
