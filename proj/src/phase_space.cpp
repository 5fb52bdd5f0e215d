#include "saddlescope/phase_space.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace saddlescope {

namespace {

int dof_of_point(const Eigen::VectorXd& z) {
  if (z.size() % 2 != 0 || z.size() < 2)
    throw StructuralError("phase-space point must have even length");
  return static_cast<int>(z.size()) / 2;
}

double eval_K(const ActionPolynomial& K, double I, const Eigen::VectorXd& J, double hbar) {
  std::vector<double> bath(J.data(), J.data() + J.size());
  return K.eval(I, std::span<const double>(bath), hbar);
}

}  // namespace

double shell_crossing(const ActionPolynomial& K, const Eigen::VectorXd& J_base,
                      const Eigen::VectorXd& direction, double E, double hbar) {
  const int d = K.dof();
  if (J_base.size() != d - 1 || direction.size() != d - 1)
    throw StructuralError("shell_crossing: bath dimension mismatch");
  std::vector<ActionPolynomial> partials;
  for (int k = 1; k < d; ++k) partials.push_back(K.partial_bath(k));
  auto value = [&](double t) { return eval_K(K, 0.0, (J_base + t * direction).eval(), hbar); };
  auto slope = [&](double t) {
    Eigen::VectorXd J = J_base + t * direction;
    std::vector<double> bath(J.data(), J.data() + J.size());
    double s = 0;
    for (int k = 0; k < d - 1; ++k)
      s += direction[k] * partials[k].eval(0.0, std::span<const double>(bath), hbar);
    return s;
  };

  const double tol = 1e-13 * std::max(1.0, std::abs(E));
  double t = 0, v = value(0.0);
  if (v >= E) return 0.0;
  // Newton walk from below; a non-positive slope before the crossing means
  // the truncated table turned over inside the shell (outside validity).
  for (int it = 0; it < 200; ++it) {
    double s = slope(t);
    if (s <= 0)
      throw ValidityError(
          "action shell: energy contour turns over before closing (table outside validity)");
    double step = (E - v) / s;
    double t_next = t + step;
    double v_next = value(t_next);
    if (v_next >= E) {
      // bracketed: bisect [t, t_next]
      double lo = t, hi = t_next;
      for (int b = 0; b < 100; ++b) {
        double mid = 0.5 * (lo + hi);
        (value(mid) < E ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
    t = t_next;
    v = v_next;
    if (E - v < tol) return t;
  }
  throw ValidityError("action shell: crossing search did not converge (asymptotic contour)");
}

namespace {

// First J_k with K(0, .., J_k, .., 0) = E along one bath axis.
double axis_intercept(const ActionPolynomial& K, double E, double hbar, int axis, int d) {
  Eigen::VectorXd base = Eigen::VectorXd::Zero(d - 1);
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(d - 1);
  dir[axis] = 1.0;
  return shell_crossing(K, base, dir, E, hbar);
}

// Adaptive Simpson on [a, b].
template <class F>
double adaptive_simpson(F&& f, double a, double b, double fa, double fm, double fb, double tol,
                        int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1);
}

template <class F>
double integrate_adaptive(F&& f, double a, double b, double tol) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return adaptive_simpson(f, a, b, fa, fm, fb, tol, 48);
}

// Radical-inverse Halton sequence for the quasi-Monte-Carlo volume.
double halton(std::uint64_t index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * double(index % base);
    index /= base;
  }
  return r;
}

}  // namespace

ActionValues momentum_map(const Eigen::VectorXd& nf_point) {
  const int d = dof_of_point(nf_point);
  ActionValues a;
  a.reactive = nf_point[0] * nf_point[d];
  a.bath = Eigen::VectorXd::Zero(d - 1);
  for (int k = 1; k < d; ++k)
    a.bath[k - 1] = 0.5 * (nf_point[k] * nf_point[k] + nf_point[d + k] * nf_point[d + k]);
  return a;
}

TrajectoryClass classify_trajectory(const ActionValues& actions, int q1_sign,
                                    double separatrix_tol) {
  if (std::abs(actions.reactive) <= separatrix_tol) return TrajectoryClass::Separatrix;
  if (actions.reactive > 0)
    return q1_sign > 0 ? TrajectoryClass::ForwardReactive : TrajectoryClass::BackwardReactive;
  // I < 0: q1 and p1 have opposite signs, so q1 < 0 means p1 - q1 > 0
  // (reactant side) and q1 > 0 the product side.
  return q1_sign < 0 ? TrajectoryClass::NonreactiveReactant : TrajectoryClass::NonreactiveProduct;
}

bool surface_membership(const Eigen::VectorXd& nf_point, double E, Surface surface,
                        const ActionPolynomial& K_cnf, double hbar_eff, double eq_tol,
                        double energy_tol) {
  const int d = dof_of_point(nf_point);
  ActionValues a = momentum_map(nf_point);
  double energy = eval_K(K_cnf, a.reactive, a.bath, hbar_eff);
  if (std::abs(energy - E) >= energy_tol) return false;

  const double q1 = nf_point[0], p1 = nf_point[d];
  auto near_zero = [&](double x) { return std::abs(x) <= eq_tol; };
  switch (surface) {
    case Surface::DividingSurface:
      return near_zero(q1 - p1);
    case Surface::ForwardHemisphere:
      return near_zero(q1 - p1) && q1 > eq_tol;
    case Surface::BackwardHemisphere:
      return near_zero(q1 - p1) && q1 < -eq_tol;
    case Surface::Nhim:
      return near_zero(q1) && near_zero(p1);
    case Surface::StableManifold:
      return near_zero(q1) && !near_zero(p1);
    case Surface::UnstableManifold:
      return near_zero(p1) && !near_zero(q1);
    case Surface::StableForward:
      return near_zero(q1) && p1 > eq_tol;
    case Surface::StableBackward:
      return near_zero(q1) && p1 < -eq_tol;
    case Surface::UnstableForward:
      return near_zero(p1) && q1 > eq_tol;
    case Surface::UnstableBackward:
      return near_zero(p1) && q1 < -eq_tol;
    case Surface::ForwardCylinder:
      return near_zero(q1 * p1) && q1 > -eq_tol && p1 > -eq_tol && !near_zero(q1 - p1);
    case Surface::BackwardCylinder:
      return near_zero(q1 * p1) && q1 < eq_tol && p1 < eq_tol && !near_zero(q1 - p1);
  }
  return false;
}

VolumeResult action_volume(const ActionPolynomial& K, double E, double hbar_eff) {
  const int d = K.dof();
  if (d < 2) throw StructuralError("action_volume requires d >= 2");
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(d - 1);
  if (eval_K(K, 0.0, zero, hbar_eff) >= E) return {0.0, 0.0};

  if (d == 2) {
    return {axis_intercept(K, E, hbar_eff, 0, d), 0.0};
  }
  if (d == 3) {
    double j2_max = axis_intercept(K, E, hbar_eff, 0, d);
    auto height = [&](double j2) {
      // J_3 extent of the contour section at fixed J_2.
      Eigen::VectorXd base(2), dir(2);
      base << j2, 0.0;
      dir << 0.0, 1.0;
      return shell_crossing(K, base, dir, E, hbar_eff);
    };
    double tol = 1e-12 * std::max(1.0, j2_max * height(0.0));
    return {integrate_adaptive(height, 0.0, j2_max, tol), 0.0};
  }

  // d > 3: quasi-Monte-Carlo rejection in the bounding box of the contour.
  std::vector<double> box(d - 1);
  double box_volume = 1.0;
  for (int k = 0; k < d - 1; ++k) {
    box[k] = axis_intercept(K, E, hbar_eff, k, d);
    box_volume *= box[k];
  }
  if (box_volume == 0.0) return {0.0, 0.0};
  static const int primes[] = {2, 3, 5, 7, 11, 13};
  const std::uint64_t n_samples = 262144;
  std::uint64_t inside = 0;
  Eigen::VectorXd J(d - 1);
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    for (int k = 0; k < d - 1; ++k) J[k] = box[k] * halton(i + 1, primes[k]);
    if (eval_K(K, 0.0, J, hbar_eff) <= E) ++inside;
  }
  double fraction = double(inside) / double(n_samples);
  double value = box_volume * fraction;
  double stderr_est = box_volume * std::sqrt(fraction * (1.0 - fraction) / double(n_samples));
  return {value, stderr_est};
}

FluxResult flux_and_weyl(const ActionPolynomial& K, double E, double hbar_eff) {
  const int d = K.dof();
  if (d < 2)
    throw StructuralError("flux_and_weyl: the bath-action volume requires d >= 2");
  VolumeResult vol = action_volume(K, E, hbar_eff);
  const double twopi = 2.0 * std::numbers::pi;
  FluxResult out;
  out.volume = vol.value;
  out.volume_standard_error = vol.standard_error;
  out.flux = std::pow(twopi, d - 1) * vol.value;
  out.weyl_count = out.flux / std::pow(twopi * hbar_eff, d - 1);
  return out;
}

Eigen::VectorXd nf_vector_field(const ActionPolynomial& K, const Eigen::VectorXd& nf_point,
                                double hbar_eff) {
  const int d = dof_of_point(nf_point);
  ActionValues a = momentum_map(nf_point);
  std::vector<double> bath(a.bath.data(), a.bath.data() + a.bath.size());
  std::span<const double> bs(bath);
  Eigen::VectorXd dz(2 * d);
  double Lambda = K.partial_reactive().eval(a.reactive, bs, hbar_eff);
  dz[0] = Lambda * nf_point[0];
  dz[d] = -Lambda * nf_point[d];
  for (int k = 1; k < d; ++k) {
    double Omega = K.partial_bath(k).eval(a.reactive, bs, hbar_eff);
    dz[k] = Omega * nf_point[d + k];
    dz[d + k] = -Omega * nf_point[k];
  }
  return dz;
}

}  // namespace saddlescope
