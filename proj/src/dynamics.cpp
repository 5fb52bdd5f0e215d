#include "saddlescope/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "saddlescope/phase_space.hpp"
#include "saddlescope/threading.hpp"

namespace saddlescope {

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561,
                 kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192, kB5 = -2187.0 / 6784,
                 kB6 = 11.0 / 84;
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

double uniform01(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

Trajectory integrate(const SystemSpec& spec, const Eigen::VectorXd& z0, double t_span,
                     double rel_tol) {
  spec.validate();
  const double direction = t_span >= 0 ? 1.0 : -1.0;
  const double t_end = std::abs(t_span);
  const double e0 = hamiltonian_value(spec, z0);
  const double energy_budget = 100.0 * rel_tol * std::max(std::abs(e0), 1.0);

  auto rhs = [&](const Eigen::VectorXd& z) {
    return (direction * hamiltonian_vector_field(spec, z)).eval();
  };

  Trajectory out;
  out.times.push_back(0.0);
  out.states.push_back(z0);

  Eigen::VectorXd z = z0;
  Eigen::VectorXd k1 = rhs(z);
  double t = 0;
  double h = std::min(1e-3, t_end > 0 ? t_end : 1e-3);
  const double abs_tol = rel_tol;

  while (t < t_end) {
    h = std::min(h, t_end - t);
    if (h < 1e-14 * std::max(1.0, t_end))
      throw ValidityError("integrate: step underflow at t = " + std::to_string(direction * t));

    Eigen::VectorXd k2 = rhs(z + h * (kA21 * k1));
    Eigen::VectorXd k3 = rhs(z + h * (kA31 * k1 + kA32 * k2));
    Eigen::VectorXd k4 = rhs(z + h * (kA41 * k1 + kA42 * k2 + kA43 * k3));
    Eigen::VectorXd k5 = rhs(z + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4));
    Eigen::VectorXd k6 = rhs(z + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5));
    Eigen::VectorXd z_new = z + h * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
    Eigen::VectorXd k7 = rhs(z_new);
    Eigen::VectorXd err_vec =
        h * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);

    double scale = abs_tol + rel_tol * std::max(z.cwiseAbs().maxCoeff(),
                                                z_new.cwiseAbs().maxCoeff());
    double err = err_vec.cwiseAbs().maxCoeff() / scale;
    if (err <= 1.0) {
      t += h;
      z = z_new;
      k1 = k7;
      out.times.push_back(direction * t);
      out.states.push_back(z);
    }
    double factor = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    h *= std::clamp(factor, 0.2, 5.0);
  }

  double e_end = hamiltonian_value(spec, z);
  if (std::abs(e_end - e0) > energy_budget)
    throw ValidityError("integrate: energy drift " + std::to_string(std::abs(e_end - e0)) +
                        " exceeds budget " + std::to_string(energy_budget));
  return out;
}

DriftReport validate_invariants(const SystemSpec& spec, const NormalFormResult& nf,
                                int n_samples, double radius, double t_max, std::uint64_t seed,
                                double rel_tol, double tracking_radius) {
  if (n_samples < 1) throw StructuralError("validate_invariants: need at least one sample");
  if (tracking_radius <= 0) tracking_radius = 2.0 * radius;
  const int d = spec.dof;
  NfTransformer transformer(nf);
  std::mt19937_64 rng(seed);

  // Draw every start point sequentially, then fan the integrations out; the
  // rows are stored by sample index so the report is scheduling-independent.
  std::vector<Eigen::VectorXd> starts(n_samples);
  for (int s = 0; s < n_samples; ++s) {
    // Uniform direction on the sphere times uniform radial mass.
    Eigen::VectorXd dir(2 * d);
    for (int i = 0; i < 2 * d; ++i) {
      double u1 = uniform01(rng), u2 = uniform01(rng);
      u1 = std::max(u1, 1e-300);
      dir[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    dir.normalize();
    double r = radius * std::pow(uniform01(rng), 1.0 / (2 * d));
    starts[s] = nf.shift + r * dir;
  }

  DriftReport report;
  report.rows.resize(n_samples);
  parallel_for_index(n_samples, [&](int s) {
    Trajectory traj = integrate(spec, starts[s], t_max, rel_tol);
    ActionValues first = momentum_map(transformer.to_normal_form(traj.states.front()));
    DriftRow row;
    row.sample = s;
    row.start = starts[s];
    row.drift_bath = Eigen::VectorXd::Zero(d - 1);
    for (const auto& state : traj.states) {
      if ((state - nf.shift).norm() > tracking_radius) break;
      ActionValues a = momentum_map(transformer.to_normal_form(state));
      row.drift_reactive =
          std::max(row.drift_reactive, std::abs(a.reactive - first.reactive));
      for (int k = 0; k < d - 1; ++k)
        row.drift_bath[k] = std::max(row.drift_bath[k], std::abs(a.bath[k] - first.bath[k]));
    }
    report.rows[s] = std::move(row);
  });

  std::vector<double> drifts;
  for (const auto& row : report.rows) drifts.push_back(row.drift_reactive);
  std::sort(drifts.begin(), drifts.end());
  size_t n = drifts.size();
  report.median_reactive_drift =
      n % 2 ? drifts[n / 2] : 0.5 * (drifts[n / 2 - 1] + drifts[n / 2]);
  return report;
}

GlobalizedManifold globalize_manifold(const SystemSpec& spec, const NormalFormResult& nf,
                                      double E, ManifoldBranch branch, double epsilon,
                                      int n_seeds, double t_span, double seed_tol,
                                      std::uint64_t seed) {
  const int d = spec.dof;
  if (d < 2) throw StructuralError("globalize_manifold: the NHIM shell requires d >= 2");
  if (n_seeds < 1) throw StructuralError("globalize_manifold: need at least one seed");
  if (!(epsilon > 0)) throw StructuralError("globalize_manifold: epsilon must be positive");
  const ActionPolynomial& K = nf.K_cnf;
  if (K.empty()) throw StructuralError("globalize_manifold: normal form lacks a classical table");
  if (E <= nf.spectrum.E0)
    throw ValidityError("globalize_manifold: NHIM is empty at E <= E0");

  NfTransformer transformer(nf);
  std::mt19937_64 rng(seed);
  GlobalizedManifold out;

  const bool unstable =
      branch == ManifoldBranch::UnstableForward || branch == ManifoldBranch::UnstableBackward;
  const bool forward_side =
      branch == ManifoldBranch::UnstableForward || branch == ManifoldBranch::StableForward;
  const double displacement = forward_side ? epsilon : -epsilon;

  for (int s = 0; s < n_seeds; ++s) {
    // Bath actions on the NHIM shell K(0, J) = E: random direction in the
    // (d-1)-simplex scaled onto the shell, then uniform torus angles.
    Eigen::VectorXd nf_point = Eigen::VectorXd::Zero(2 * d);
    {
      Eigen::VectorXd w(d - 1);
      double wsum = 0;
      for (int k = 0; k < d - 1; ++k) {
        w[k] = -std::log(std::max(uniform01(rng), 1e-300));
        wsum += w[k];
      }
      w /= wsum;
      double t = shell_crossing(K, Eigen::VectorXd::Zero(d - 1), w, E, nf.hbar_eff);
      Eigen::VectorXd J = t * w;
      for (int k = 1; k < d; ++k) {
        double theta = 2.0 * std::numbers::pi * uniform01(rng);
        nf_point[k] = std::sqrt(2.0 * J[k - 1]) * std::cos(theta);
        nf_point[d + k] = std::sqrt(2.0 * J[k - 1]) * std::sin(theta);
      }
    }
    if (unstable)
      nf_point[0] = displacement;  // p1 = 0, q1 = +/- epsilon
    else
      nf_point[d] = displacement;  // q1 = 0, p1 = +/- epsilon

    ManifoldSeed ms;
    ms.nf_point = nf_point;
    ms.physical_point = transformer.from_normal_form(nf_point);
    double h_seed = hamiltonian_value(spec, ms.physical_point);
    if (std::abs(h_seed - E) > seed_tol)
      throw ValidityError("globalize_manifold: seed energy error " +
                          std::to_string(std::abs(h_seed - E)) + " exceeds " +
                          std::to_string(seed_tol));
    out.seeds.push_back(ms);
  }

  out.trajectories.resize(out.seeds.size());
  const double span = unstable ? t_span : -t_span;  // stable branches run backward
  parallel_for_index(static_cast<int>(out.seeds.size()), [&](int s) {
    out.trajectories[s] = integrate(spec, out.seeds[s].physical_point, span);
  });
  return out;
}

}  // namespace saddlescope
