#include "saddlescope/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <set>
#include <string>

#include "saddlescope/complex_gamma.hpp"

namespace saddlescope {

namespace {

constexpr double kPi = std::numbers::pi;

struct TableLinearData {
  double e0 = 0;       // j = 0 constant
  double lambda = 0;   // coefficient of I
  Eigen::VectorXd omega;  // coefficients of J_k
};

TableLinearData linear_data(const ActionPolynomial& K) {
  const int d = K.dof();
  TableLinearData out;
  out.omega = Eigen::VectorXd::Zero(d - 1);
  std::vector<int> exps(d, 0);
  out.e0 = K.coefficient(exps, 0);
  exps[0] = 1;
  out.lambda = K.coefficient(exps, 0);
  exps[0] = 0;
  for (int k = 1; k < d; ++k) {
    exps[k] = 1;
    out.omega[k - 1] = K.coefficient(exps, 0);
    exps[k] = 0;
  }
  if (out.lambda <= 0)
    throw ValidityError("action table has non-positive linear reactive coefficient");
  return out;
}

std::vector<double> bath_values(std::span<const int> n, double hbar) {
  std::vector<double> J(n.size());
  for (std::size_t k = 0; k < n.size(); ++k) J[k] = hbar * (n[k] + 0.5);
  return J;
}

}  // namespace

double transmission(double I, double hbar_eff) {
  double x = 2.0 * kPi * I / hbar_eff;
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double t = std::exp(x);
  return t / (1.0 + t);
}

double reflection(double I, double hbar_eff) { return 1.0 - transmission(I, hbar_eff); }

double flux_expectation(double I, double hbar_eff, FluxSide side) {
  double sign = side == FluxSide::Reactants ? 1.0 : -1.0;
  return sign * transmission(I, hbar_eff) / (2.0 * kPi * hbar_eff);
}

Eigen::Matrix2cd smatrix_local(double I, double hbar_eff) {
  using namespace std::complex_literals;
  const double x = I / hbar_eff;
  // log of the common prefactor e^{i(pi/4 - x ln hbar)} Gamma(1/2 - ix) / sqrt(2 pi);
  // the hyperbolic weights are folded in before exponentiating so that large
  // |x| stays in range.
  std::complex<double> log_pref = std::complex<double>(0.0, kPi / 4.0 - x * std::log(hbar_eff)) +
                                  log_gamma_half_minus_ix(x) - 0.5 * std::log(2.0 * kPi);
  std::complex<double> diag = -1i * std::exp(log_pref - kPi * x / 2.0);
  std::complex<double> off = std::exp(log_pref + kPi * x / 2.0);
  Eigen::Matrix2cd S;
  S << diag, off, off, diag;
  return S;
}

double solve_channel_action(const ActionPolynomial& K_op, double E, std::span<const int> n,
                            double hbar_eff) {
  const int d = K_op.dof();
  if (static_cast<int>(n.size()) != d - 1)
    throw StructuralError("solve_channel_action: channel must have d-1 quantum numbers");
  TableLinearData lin = linear_data(K_op);
  std::vector<double> J = bath_values(n, hbar_eff);
  double shift = 0;
  for (int k = 0; k < d - 1; ++k) shift += lin.omega[k] * J[k];

  ActionPolynomial dK = K_op.partial_reactive();
  std::span<const double> Js(J);
  double I = (E - lin.e0 - shift) / lin.lambda;
  const double tol = 1e-12 * std::max(1.0, std::abs(E));
  for (int it = 0; it < 50; ++it) {
    double g = K_op.eval(I, Js, hbar_eff) - E;
    if (std::abs(g) < tol) {
      double slope = dK.eval(I, Js, hbar_eff);
      if (slope <= 0)
        throw ValidityError("solve_channel_action: dK/dI <= 0 at the root (outside validity)");
      return I;
    }
    double slope = dK.eval(I, Js, hbar_eff);
    if (slope <= 0)
      throw ValidityError("solve_channel_action: dK/dI <= 0 during iteration (outside validity)");
    I -= g / slope;
  }
  throw ConvergenceError("solve_channel_action: Newton did not converge in 50 steps");
}

namespace {

// Channels in increasing sum omega_k n_k order.  The walk closes after
// `consecutive_closed` successive channels fall below the transmission
// cutoff (transmission decays double-exponentially past threshold).
template <class Visitor>
void walk_channels(const ActionPolynomial& K_op, const CrpOptions& opts, Visitor&& visit) {
  const int d = K_op.dof();
  if (d == 1) {
    visit(std::vector<int>{});
    return;
  }
  TableLinearData lin = linear_data(K_op);
  struct Node {
    double weight;
    std::vector<int> n;
  };
  auto cmp = [](const Node& a, const Node& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.n > b.n;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(cmp)> queue(cmp);
  std::set<std::vector<int>> seen;
  std::vector<int> zero(d - 1, 0);
  queue.push({0.0, zero});
  seen.insert(zero);
  int closed_run = 0;
  while (!queue.empty()) {
    Node node = queue.top();
    queue.pop();
    bool open = visit(node.n);
    closed_run = open ? 0 : closed_run + 1;
    if (closed_run >= opts.consecutive_closed) break;
    for (int k = 0; k < d - 1; ++k) {
      std::vector<int> next = node.n;
      next[k] += 1;
      if (!seen.insert(next).second) continue;
      double w = 0;
      for (int j = 0; j < d - 1; ++j) w += lin.omega[j] * next[j];
      queue.push({w, std::move(next)});
    }
  }
}

}  // namespace

CrpResult crp(const ActionPolynomial& K_op, double E, double hbar_eff, CrpOptions opts) {
  TableLinearData lin = linear_data(K_op);
  CrpResult result;
  walk_channels(K_op, opts, [&](const std::vector<int>& n) {
    // Quadratic-order estimate used both as a skip heuristic for deeply
    // closed channels and as the Newton start inside the solver.
    double shift = 0;
    for (std::size_t k = 0; k < n.size(); ++k) shift += lin.omega[k] * hbar_eff * (n[k] + 0.5);
    double I_estimate = (E - lin.e0 - shift) / lin.lambda;

    double I;
    try {
      I = solve_channel_action(K_op, E, n, hbar_eff);
    } catch (const ValidityError&) {
      if (transmission(I_estimate, hbar_eff) < opts.channel_cutoff) return false;
      throw;
    }
    if (opts.min_action && I < *opts.min_action) return false;
    double T = transmission(I, hbar_eff);
    if (T < opts.channel_cutoff) return false;
    result.value += T;
    result.channels.push_back({n, I, T});
    return true;
  });
  return result;
}

std::vector<std::pair<Channel, Eigen::Matrix2cd>> smatrix_full(const ActionPolynomial& K_op,
                                                               double E, double hbar_eff,
                                                               CrpOptions opts) {
  CrpResult channels = crp(K_op, E, hbar_eff, opts);
  std::vector<std::pair<Channel, Eigen::Matrix2cd>> blocks;
  blocks.reserve(channels.channels.size());
  for (const auto& ch : channels.channels)
    blocks.emplace_back(ch, smatrix_local(ch.action, hbar_eff));
  return blocks;
}

namespace {

template <class F>
double adaptive_simpson(F&& f, double a, double b, double fa, double fm, double fb, double tol,
                        int depth) {
  double m = 0.5 * (a + b);
  double flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1);
}

}  // namespace

double thermal_rate(const std::function<double(double)>& crp_curve, double e_min, double e_max,
                    double beta, double reactant_partition) {
  if (!(e_max > e_min)) throw StructuralError("thermal_rate: e_max must exceed e_min");
  if (!(beta > 0) || !(reactant_partition > 0))
    throw StructuralError("thermal_rate: beta and Q_r must be positive");

  auto integrand = [&](double E) { return std::exp(-beta * E) * crp_curve(E); };

  // Coarse scale estimate, then adaptive refinement to 1e-8 relative.
  const int coarse_n = 64;
  double coarse = 0;
  for (int i = 0; i < coarse_n; ++i) {
    double E = e_min + (e_max - e_min) * (i + 0.5) / coarse_n;
    coarse += integrand(E);
  }
  coarse *= (e_max - e_min) / coarse_n;
  double tol = 1e-9 * std::max(std::abs(coarse), 1e-300);
  double integral = adaptive_simpson(integrand, e_min, e_max, integrand(e_min),
                                     integrand(0.5 * (e_min + e_max)), integrand(e_max), tol, 52);

  // Boundary masses outside the window.  Right: N frozen at its edge value.
  // Left: extrapolate N by its local log-slope; the physical integral starts
  // at E = 0, so for e_min > 0 the exterior is the finite strip [0, e_min],
  // while for e_min <= 0 the model decay must beat the Boltzmann growth.
  double n_max_edge = crp_curve(e_max);
  double tail_right = n_max_edge * std::exp(-beta * e_max) / beta;
  double tail_left = 0;
  double n_min_edge = crp_curve(e_min);
  if (n_min_edge > 0) {
    double delta = 1e-3 * (e_max - e_min);
    double n_next = crp_curve(e_min + delta);
    double rate = n_next > 0 ? std::log(n_next / n_min_edge) / delta : 0.0;
    double g = rate - beta;  // model integrand ~ n_min_edge e^{-beta e_min} e^{g (E - e_min)}
    if (e_min > 0) {
      tail_left = n_min_edge * std::exp(-beta * e_min) *
                  (std::abs(g) < 1e-12 ? e_min : (1.0 - std::exp(-g * e_min)) / g);
    } else if (e_min < 0) {
      tail_left = g > 0 ? n_min_edge * std::exp(-beta * e_min) / g
                        : std::numeric_limits<double>::infinity();
    }  // e_min == 0: the window starts at the physical lower limit
  }
  if (!(tail_left + tail_right <= 1e-6 * std::max(integral, 1e-300)))
    throw ValidityError("thermal_rate: insufficient energy window, boundary mass ~ " +
                        std::to_string(tail_left + tail_right) + " vs integral " +
                        std::to_string(integral));
  return integral / (2.0 * kPi * reactant_partition);
}

std::vector<ResonanceEntry> resonances(const ActionPolynomial& K_op, double hbar_eff,
                                       std::span<const int> n_max) {
  const int d = K_op.dof();
  if (static_cast<int>(n_max.size()) != d)
    throw StructuralError("resonances: n_max must have one bound per mode");
  std::vector<ResonanceEntry> table;
  std::vector<int> n(d, 0);
  auto rec = [&](auto&& self, int mode) -> void {
    if (mode == d) {
      std::complex<double> I(0.0, -hbar_eff * (n[0] + 0.5));
      std::vector<double> J = bath_values(std::span<const int>(n).subspan(1), hbar_eff);
      std::complex<double> E = K_op.eval(I, std::span<const double>(J), hbar_eff);
      ResonanceEntry entry;
      entry.n = n;
      entry.energy = E;
      entry.lifetime = hbar_eff / std::abs(E.imag());
      entry.valid = E.imag() <= 0;
      table.push_back(std::move(entry));
      return;
    }
    for (n[mode] = 0; n[mode] <= n_max[mode]; ++n[mode]) self(self, mode + 1);
    n[mode] = 0;
  };
  rec(rec, 0);
  std::stable_sort(table.begin(), table.end(), [](const ResonanceEntry& a, const ResonanceEntry& b) {
    return std::abs(a.energy.imag()) < std::abs(b.energy.imag());
  });
  return table;
}

std::vector<double> autocorrelation(const ActionPolynomial& K_op, double hbar_eff,
                                    std::span<const int> bath_n, std::span<const double> t_grid) {
  const int d = K_op.dof();
  if (static_cast<int>(bath_n.size()) != d - 1)
    throw StructuralError("autocorrelation: bath quantum numbers must have length d-1");
  std::vector<double> J = bath_values(bath_n, hbar_eff);
  std::span<const double> Js(J);

  double t_min_pos = 0;
  for (double t : t_grid)
    if (t > 0 && (t_min_pos == 0 || t < t_min_pos)) t_min_pos = t;
  if (t_min_pos == 0) return std::vector<double>(t_grid.size(), 1.0);

  std::vector<std::complex<double>> amplitude(t_grid.size(), 0.0);
  // c_m = sqrt(2/pi) Gamma(m + 1/2)/m!; the alternating sum of the c_m alone
  // is Abel-summable to 1, which fixes the t = 0 normalization exactly.
  double c = std::sqrt(2.0);
  const int m_cap = 200000;
  bool truncated = false;
  for (int m = 0; m < m_cap; ++m) {
    std::complex<double> I(0.0, -hbar_eff * (2 * m + 0.5));
    std::complex<double> E = K_op.eval(I, Js, hbar_eff);
    if (E.imag() > 0)
      throw ValidityError("autocorrelation: non-decaying resonance (Im E > 0) in the sum");
    double sign = (m % 2 == 0) ? 1.0 : -1.0;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
      if (t_grid[i] <= 0) continue;
      amplitude[i] += sign * c *
                      std::exp(std::complex<double>(0, -1) * E * (t_grid[i] / hbar_eff));
    }
    // largest surviving term magnitude at the smallest positive time
    double decay = std::exp(E.imag() * t_min_pos / hbar_eff);
    if (c * decay < 1e-14) {
      truncated = true;
      break;
    }
    c *= (m + 0.5) / (m + 1.0);
  }
  if (!truncated)
    throw ConvergenceError("autocorrelation: series did not reach the 1e-14 truncation");

  std::vector<double> out(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    out[i] = t_grid[i] <= 0 ? 1.0 : std::norm(amplitude[i]);
  return out;
}

ConvergenceEstimate convergence_radius(std::span<const double> coefficients) {
  if (coefficients.size() < 2)
    throw StructuralError("convergence_radius: need at least two coefficients");
  ConvergenceEstimate out;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < coefficients.size(); ++i) {
    if (coefficients[i] == 0.0 || coefficients[i + 1] == 0.0) continue;
    double r = coefficients[i] / coefficients[i + 1];
    out.ratios.push_back(r);
    best = std::min(best, std::abs(r));
  }
  if (out.ratios.empty())
    throw StructuralError("convergence_radius: all ratios skipped (zero coefficients)");
  out.estimate = best;
  return out;
}

}  // namespace saddlescope
