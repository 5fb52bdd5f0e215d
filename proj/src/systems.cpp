#include "saddlescope/systems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <set>
#include <string>

#include "saddlescope/power_series.hpp"

namespace saddlescope {

namespace {

double eckart_q0(const EckartPotential& e) { return e.a * std::log((e.B + e.A) / (e.B - e.A)); }

double eckart_value(const EckartPotential& e, double q) {
  double y = std::exp((q + eckart_q0(e)) / e.a);
  return e.A * y / (1.0 + y) + e.B * y / ((1.0 + y) * (1.0 + y));
}

double eckart_derivative(const EckartPotential& e, double q) {
  double y = std::exp((q + eckart_q0(e)) / e.a);
  double u = 1.0 + y;
  // dV/dy * dy/dq with dy/dq = y/a
  double dVdy = e.A / (u * u) + e.B * (1.0 - y) / (u * u * u);
  return dVdy * y / e.a;
}

double morse_value(const MorsePotential& m, double q) {
  return m.De * (std::exp(-2.0 * m.aM * q) - 2.0 * std::exp(-m.aM * q));
}

double morse_derivative(const MorsePotential& m, double q) {
  return m.De * (-2.0 * m.aM * std::exp(-2.0 * m.aM * q) + 2.0 * m.aM * std::exp(-m.aM * q));
}

double polynomial_value(const PolynomialPotential& p, double q) {
  double v = 0;
  for (auto it = p.coefficients.rbegin(); it != p.coefficients.rend(); ++it) v = v * q + *it;
  return v;
}

double polynomial_derivative(const PolynomialPotential& p, double q) {
  double v = 0;
  for (int k = static_cast<int>(p.coefficients.size()) - 1; k >= 1; --k)
    v = v * q + double(k) * p.coefficients[k];
  return v;
}

// Taylor coefficients of the potential about q = center, as a power series
// in the displacement u.
PowerSeries potential_series(const Potential& pot, double center, int order) {
  if (const auto* e = std::get_if<EckartPotential>(&pot)) {
    // y(u) = y0 exp(u/a); V = A y/(1+y) + B y/(1+y)^2
    double y0 = std::exp((center + eckart_q0(*e)) / e->a);
    PowerSeries expu = PowerSeries::exp_of(PowerSeries::variable(order, 1.0 / e->a));
    PowerSeries y = y0 * expu;
    PowerSeries one = PowerSeries::constant(order, 1.0);
    PowerSeries u1 = one + y;
    return e->A * (y / u1) + e->B * (y / (u1 * u1));
  }
  if (const auto* m = std::get_if<MorsePotential>(&pot)) {
    PowerSeries e1 = std::exp(-m->aM * center) *
                     PowerSeries::exp_of(PowerSeries::variable(order, -m->aM));
    PowerSeries e2 = std::exp(-2.0 * m->aM * center) *
                     PowerSeries::exp_of(PowerSeries::variable(order, -2.0 * m->aM));
    return m->De * (e2 - 2.0 * e1);
  }
  if (const auto* h = std::get_if<HarmonicPotential>(&pot)) {
    PowerSeries s(order);
    double w2 = h->omega * h->omega;
    if (order >= 0) s[0] = 0.5 * w2 * center * center;
    if (order >= 1) s[1] = w2 * center;
    if (order >= 2) s[2] = 0.5 * w2;
    return s;
  }
  const auto& p = std::get<PolynomialPotential>(pot);
  // Shift the explicit coefficients: V(center + u), Horner in (center + u).
  PowerSeries v(order);
  PowerSeries x = PowerSeries::variable(order);
  x[0] = center;
  for (auto it = p.coefficients.rbegin(); it != p.coefficients.rend(); ++it)
    v = v * x + PowerSeries::constant(order, *it);
  return v;
}

}  // namespace

void SystemSpec::validate() const {
  Monomial::check_dof(dof);
  if (hbar_eff <= 0) throw StructuralError("hbar_eff must be positive");
  if (static_cast<int>(potentials.size()) != dof)
    throw StructuralError("expected one potential per coordinate, got " +
                          std::to_string(potentials.size()) + " for dof " + std::to_string(dof));
  for (const auto& pot : potentials) {
    if (const auto* e = std::get_if<EckartPotential>(&pot)) {
      if (!(e->a > 0)) throw StructuralError("eckart: a must be positive");
      if (!(e->A >= 0)) throw StructuralError("eckart: A must be non-negative");
      if (!(e->B > e->A)) throw StructuralError("eckart: B > A required");
    } else if (const auto* m = std::get_if<MorsePotential>(&pot)) {
      if (!(m->De > 0)) throw StructuralError("morse: De must be positive");
      if (!(m->aM > 0)) throw StructuralError("morse: aM must be positive");
    } else if (const auto* h = std::get_if<HarmonicPotential>(&pot)) {
      if (!(h->omega > 0)) throw StructuralError("harmonic: omega must be positive");
    }
  }
  for (const auto& c : couplings) {
    if (const auto* pc = std::get_if<PolynomialCoupling>(&c)) {
      if (pc->poly.dof() != dof) throw StructuralError("polynomial coupling dof mismatch");
    }
  }
}

double potential_value(const SystemSpec& spec, int coordinate, double q) {
  const Potential& pot = spec.potentials.at(coordinate);
  if (const auto* e = std::get_if<EckartPotential>(&pot)) return eckart_value(*e, q);
  if (const auto* m = std::get_if<MorsePotential>(&pot)) return morse_value(*m, q);
  if (const auto* h = std::get_if<HarmonicPotential>(&pot))
    return 0.5 * h->omega * h->omega * q * q;
  return polynomial_value(std::get<PolynomialPotential>(pot), q);
}

double potential_derivative(const SystemSpec& spec, int coordinate, double q) {
  const Potential& pot = spec.potentials.at(coordinate);
  if (const auto* e = std::get_if<EckartPotential>(&pot)) return eckart_derivative(*e, q);
  if (const auto* m = std::get_if<MorsePotential>(&pot)) return morse_derivative(*m, q);
  if (const auto* h = std::get_if<HarmonicPotential>(&pot)) return h->omega * h->omega * q;
  return polynomial_derivative(std::get<PolynomialPotential>(pot), q);
}

double hamiltonian_value(const SystemSpec& spec, const Eigen::VectorXd& z) {
  const int d = spec.dof;
  double h = 0;
  for (int k = 0; k < d; ++k) h += 0.5 * z[d + k] * z[d + k] + potential_value(spec, k, z[k]);
  for (const auto& c : spec.couplings) {
    if (const auto* kc = std::get_if<KineticCoupling>(&c)) {
      for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) h += kc->epsilon * z[d + i] * z[d + j];
    } else {
      h += std::get<PolynomialCoupling>(c).poly.eval(z, spec.hbar_eff);
    }
  }
  return h;
}

Eigen::VectorXd hamiltonian_vector_field(const SystemSpec& spec, const Eigen::VectorXd& z) {
  const int d = spec.dof;
  Eigen::VectorXd dz = Eigen::VectorXd::Zero(2 * d);
  for (int k = 0; k < d; ++k) {
    dz[k] = z[d + k];                                 // dq/dt = dH/dp
    dz[d + k] = -potential_derivative(spec, k, z[k]);  // dp/dt = -dH/dq
  }
  for (const auto& c : spec.couplings) {
    if (const auto* kc = std::get_if<KineticCoupling>(&c)) {
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          if (i != j) dz[i] += kc->epsilon * z[d + j];
    } else {
      const PhasePolynomial& hp = std::get<PolynomialCoupling>(c).poly;
      for (int k = 0; k < d; ++k) {
        dz[k] += hp.derivative(d + k).eval(z, spec.hbar_eff);
        dz[d + k] -= hp.derivative(k).eval(z, spec.hbar_eff);
      }
    }
  }
  return dz;
}

PhasePolynomial taylor_expand(const SystemSpec& spec, const Eigen::VectorXd& center, int order) {
  spec.validate();
  const int d = spec.dof;
  if (center.size() != 2 * d) throw StructuralError("taylor_expand: center must have length 2*dof");
  PhasePolynomial h(d, order);

  for (int k = 0; k < d; ++k) {
    // Kinetic term 1/2 (p_k + c)^2 expanded about the center momentum.
    double pc = center[d + k];
    PhasePolynomial pk = PhasePolynomial::p_var(d, order, k);
    PhasePolynomial paff = pk + PhasePolynomial::constant(d, order, pc);
    h += 0.5 * (paff * paff);

    PowerSeries vs = potential_series(spec.potentials[k], center[k], order);
    PhasePolynomial qk = PhasePolynomial::q_var(d, order, k);
    PhasePolynomial qp = PhasePolynomial::constant(d, order, 1.0);
    for (int n = 0; n <= std::min(order, vs.order()); ++n) {
      if (vs[n] != 0.0) h += vs[n] * qp;
      qp = qp * qk;
    }
  }
  for (const auto& c : spec.couplings) {
    if (const auto* kc = std::get_if<KineticCoupling>(&c)) {
      for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
          PhasePolynomial pi =
              PhasePolynomial::p_var(d, order, i) + PhasePolynomial::constant(d, order, center[d + i]);
          PhasePolynomial pj =
              PhasePolynomial::p_var(d, order, j) + PhasePolynomial::constant(d, order, center[d + j]);
          h += kc->epsilon * (pi * pj);
        }
      }
    } else {
      h += std::get<PolynomialCoupling>(c).poly.truncated(order).shift(center);
    }
  }
  return h;
}

EquilibriumResult find_equilibrium(const SystemSpec& spec, const Eigen::VectorXd& guess_q) {
  spec.validate();
  const int d = spec.dof;
  if (guess_q.size() != d && guess_q.size() != 2 * d)
    throw StructuralError("find_equilibrium: guess must have length dof or 2*dof");
  Eigen::VectorXd z = Eigen::VectorXd::Zero(2 * d);
  z.head(guess_q.size()) = guess_q;

  auto gradient_and_hessian = [&](const Eigen::VectorXd& at, Eigen::VectorXd& g,
                                  Eigen::MatrixXd& hess) {
    PhasePolynomial local = taylor_expand(spec, at, 2);
    g = Eigen::VectorXd::Zero(2 * d);
    hess = Eigen::MatrixXd::Zero(2 * d, 2 * d);
    for (const auto& [m, c] : local.terms()) {
      int g1 = -1, g2 = -1, total = 0;
      for (int i = 0; i < 2 * d && total <= 2; ++i) {
        for (unsigned e = m.slot(d, i); e > 0; --e) {
          if (g1 < 0)
            g1 = i;
          else
            g2 = i;
          ++total;
        }
      }
      if (total == 1) g[g1] += c;
      if (total == 2) {
        if (g1 == g2) {
          hess(g1, g1) += 2.0 * c;
        } else {
          hess(g1, g2) += c;
          hess(g2, g1) += c;
        }
      }
    }
  };

  Eigen::VectorXd g;
  Eigen::MatrixXd hess;
  double prev_norm = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 100; ++it) {
    gradient_and_hessian(z, g, hess);
    double norm = g.norm();
    if (norm < 1e-12) return {z, hess, norm, it};
    Eigen::VectorXd step = hess.fullPivLu().solve(-g);
    if (norm > prev_norm) step *= 0.5;  // damp when the residual grows
    prev_norm = norm;
    z += step;
  }
  gradient_and_hessian(z, g, hess);
  if (g.norm() < 1e-12) return {z, hess, g.norm(), 100};
  throw ConvergenceError("find_equilibrium: no convergence in 100 iterations, |grad| = " +
                         std::to_string(g.norm()));
}

EckartOracleParams eckart_oracle_params(double a, double A, double B, double hbar_eff,
                                        double E) {
  if (!(a > 0) || !(A >= 0) || !(B > A) || !(hbar_eff > 0))
    throw StructuralError("eckart_oracle_params: invalid parameters");
  EckartOracleParams p;
  p.C = hbar_eff * hbar_eff / (8.0 * a * a);
  if (!(E > A)) throw DomainError("eckart_oracle_params: requires E > A");
  if (!(B > p.C)) throw DomainError("eckart_oracle_params: requires B > C");
  p.alpha = 0.5 * std::sqrt(E / p.C);
  p.beta = 0.5 * std::sqrt((E - A) / p.C);
  p.delta = 0.5 * std::sqrt((B - p.C) / p.C);
  return p;
}

double eckart_exact_transmission(double a, double A, double B, double hbar_eff, double E) {
  if (!(a > 0) || !(A >= 0) || !(B > A) || !(hbar_eff > 0))
    throw StructuralError("eckart_exact_transmission: invalid parameters");
  if (E <= A) return 0.0;
  const double C = hbar_eff * hbar_eff / (8.0 * a * a);
  const double twopi = 2.0 * std::numbers::pi;
  const double alpha = 0.5 * std::sqrt(E / C);
  const double beta = 0.5 * std::sqrt((E - A) / C);
  // delta^2 = (B - C)/(4C) may be negative, in which case cosh -> cos.
  const double delta_sq = (B - C) / (4.0 * C);

  // T = 1 - [cosh(2pi(alpha-beta)) + cd] / [cosh(2pi(alpha+beta)) + cd],
  // evaluated with all exponentials rescaled by the largest one.
  double xm = twopi * (alpha - beta);
  double xp = twopi * (alpha + beta);
  double xd = delta_sq >= 0 ? twopi * std::sqrt(delta_sq) : 0.0;
  double L = std::max({std::abs(xm), xp, xd});
  auto scaled_cosh = [&](double x) { return 0.5 * (std::exp(x - L) + std::exp(-x - L)); };
  double cd = delta_sq >= 0 ? scaled_cosh(xd)
                            : std::cos(twopi * std::sqrt(-delta_sq)) * std::exp(-L);
  double num = scaled_cosh(xm) + cd;
  double den = scaled_cosh(xp) + cd;
  double t = 1.0 - num / den;
  return std::clamp(t, 0.0, 1.0);
}

double morse_levels(double De, double aM, double hbar_eff, int n) {
  if (!(De > 0) || !(aM > 0) || !(hbar_eff > 0))
    throw StructuralError("morse_levels: invalid parameters");
  double bound = std::sqrt(2.0 * De) / (aM * hbar_eff);
  if (n < 0 || n + 0.5 >= bound)
    throw DomainError("morse_levels: n = " + std::to_string(n) +
                      " at or above the dissociation bound " + std::to_string(bound - 0.5));
  double u = n + 0.5 - bound;
  return -0.5 * aM * aM * hbar_eff * hbar_eff * u * u;
}

int morse_level_count(double De, double aM, double hbar_eff) {
  double bound = std::sqrt(2.0 * De) / (aM * hbar_eff);
  int count = static_cast<int>(std::ceil(bound - 0.5));
  return std::max(count, 0);
}

bool has_uncoupled_crp_oracle(const SystemSpec& spec) {
  if (spec.dof < 1) return false;
  if (!std::holds_alternative<EckartPotential>(spec.potentials[0])) return false;
  for (int k = 1; k < spec.dof; ++k)
    if (!std::holds_alternative<MorsePotential>(spec.potentials[k])) return false;
  for (const auto& c : spec.couplings) {
    if (const auto* kc = std::get_if<KineticCoupling>(&c)) {
      if (kc->epsilon != 0.0) return false;
    } else {
      if (!std::get<PolynomialCoupling>(c).poly.empty()) return false;
    }
  }
  return true;
}

double exact_crp_uncoupled(const SystemSpec& spec, double E) {
  spec.validate();
  if (!has_uncoupled_crp_oracle(spec))
    throw StructuralError("exact_crp_uncoupled requires an uncoupled Eckart-Morse-... spec");
  const auto& eck = std::get<EckartPotential>(spec.potentials[0]);
  const int d = spec.dof;

  if (d == 1) return eckart_exact_transmission(eck.a, eck.A, eck.B, spec.hbar_eff, E);

  // Morse level tables per bath mode, naturally increasing in n.
  std::vector<std::vector<double>> levels;
  for (int k = 1; k < d; ++k) {
    const auto& m = std::get<MorsePotential>(spec.potentials[k]);
    int count = morse_level_count(m.De, m.aM, spec.hbar_eff);
    std::vector<double> lv(count);
    for (int n = 0; n < count; ++n) lv[n] = morse_levels(m.De, m.aM, spec.hbar_eff, n);
    levels.push_back(std::move(lv));
  }

  // Enumerate bath shells in increasing total Morse energy; each term is 0
  // once the shifted argument drops below A, and deeper shells only shift it
  // lower, so the walk stops at the first all-zero shell.
  struct Node {
    double esum;
    std::vector<int> n;
  };
  auto cmp = [](const Node& x, const Node& y) {
    if (x.esum != y.esum) return x.esum > y.esum;
    return x.n > y.n;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(cmp)> queue(cmp);
  std::set<std::vector<int>> seen;
  std::vector<int> zero(d - 1, 0);
  double base = 0;
  for (const auto& lv : levels) base += lv[0];
  queue.push({base, zero});
  seen.insert(zero);

  double total = 0;
  while (!queue.empty()) {
    Node node = queue.top();
    queue.pop();
    double arg = E - node.esum;
    if (arg <= eck.A) break;  // this and all deeper shells contribute 0
    total += eckart_exact_transmission(eck.a, eck.A, eck.B, spec.hbar_eff, arg);
    for (int k = 0; k < d - 1; ++k) {
      if (node.n[k] + 1 >= static_cast<int>(levels[k].size())) continue;
      std::vector<int> next = node.n;
      next[k] += 1;
      if (!seen.insert(next).second) continue;
      double esum = 0;
      for (int j = 0; j < d - 1; ++j) esum += levels[j][next[j]];
      queue.push({esum, std::move(next)});
    }
  }
  return total;
}

}  // namespace saddlescope
