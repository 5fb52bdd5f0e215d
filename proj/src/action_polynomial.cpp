#include "saddlescope/action_polynomial.hpp"

#include <map>
#include <utility>
#include <vector>

namespace saddlescope {

namespace {

// Expansion of Op[X^n] over operator powers: coefficient table keyed by
// (operator power m, hbar power j).  `sign` is -1 for I and +1 for J.
using PowerTable = std::map<std::pair<int, int>, double>;

const std::vector<PowerTable>& power_tables(int max_power, int sign) {
  static std::vector<PowerTable> tables_i, tables_j;
  auto& tables = sign < 0 ? tables_i : tables_j;
  if (tables.empty()) {
    tables.push_back({{{0, 0}, 1.0}});
    tables.push_back({{{1, 0}, 1.0}});
  }
  while (static_cast<int>(tables.size()) <= max_power) {
    int n = static_cast<int>(tables.size()) - 1;
    PowerTable next;
    for (const auto& [mj, c] : tables[n]) next[{mj.first + 1, mj.second}] += c;
    for (const auto& [mj, c] : tables[n - 1])
      next[{mj.first, mj.second + 2}] += double(sign) * 0.25 * double(n) * double(n) * c;
    tables.push_back(std::move(next));
  }
  return tables;
}

}  // namespace

ActionPolynomial weyl_order(const ActionPolynomial& symbol) {
  const int d = symbol.dof();
  int max_power = 0;
  for (const auto& [m, c] : symbol.terms())
    for (int k = 0; k < d; ++k) max_power = std::max(max_power, static_cast<int>(m.slot(d, k)));
  const auto& tab_i = power_tables(max_power, -1);
  const auto& tab_j = power_tables(max_power, +1);

  std::vector<ActionPolynomial::Term> out;
  for (const auto& [m, c] : symbol.terms()) {
    // Running product over the d action factors.
    std::vector<std::pair<Monomial, double>> partial;
    Monomial base;
    base.set_slot(d, 2 * d, static_cast<int>(m.slot(d, 2 * d)));
    partial.emplace_back(base, c);
    for (int k = 0; k < d; ++k) {
      unsigned a = m.slot(d, k);
      if (a == 0) continue;
      const PowerTable& tab = (k == 0 ? tab_i : tab_j)[a];
      std::vector<std::pair<Monomial, double>> next;
      for (const auto& [mono, coeff] : partial) {
        for (const auto& [mj, t] : tab) {
          Monomial nm = mono;
          nm.set_slot(d, k, mj.first);
          nm.set_slot(d, 2 * d, static_cast<int>(nm.slot(d, 2 * d)) + mj.second);
          next.emplace_back(nm, coeff * t);
        }
      }
      partial = std::move(next);
    }
    out.insert(out.end(), partial.begin(), partial.end());
  }
  return ActionPolynomial::from_terms(d, std::move(out));
}

ActionPolynomial weyl_unorder(const ActionPolynomial& ordered) {
  // weyl_order is the identity plus a strictly power-lowering correction,
  // so the fixed-point iteration terminates after max action degree steps.
  ActionPolynomial x = ordered;
  double scale = 0;
  for (const auto& [m, c] : ordered.terms()) scale = std::max(scale, std::abs(c));
  for (int it = 0; it < 24; ++it) {
    ActionPolynomial residual = ordered - weyl_order(x);
    double rmax = 0;
    for (const auto& [m, c] : residual.terms()) rmax = std::max(rmax, std::abs(c));
    if (rmax <= 1e-14 * std::max(1.0, scale)) return x;
    x = x + residual;
  }
  throw ConvergenceError("weyl_unorder: fixed point iteration failed");
}

}  // namespace saddlescope
