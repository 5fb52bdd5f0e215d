#ifndef SADDLESCOPE_DYNAMICS_HPP
#define SADDLESCOPE_DYNAMICS_HPP

#include <Eigen/Dense>
#include <vector>

#include "saddlescope/normal_form.hpp"
#include "saddlescope/systems.hpp"

namespace saddlescope {

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
};

// Adaptive embedded Runge-Kutta 4(5) integration of Hamilton's equations in
// the physical coordinates.  Energy drift beyond 100 * tol * |H(z0)| raises
// ValidityError; step underflow reports the failure location.
Trajectory integrate(const SystemSpec& spec, const Eigen::VectorXd& z0, double t_span,
                     double rel_tol = 1e-10);

// One row per sample of the truncation validation: the largest excursion of
// each normal-form integral along a full-dynamics trajectory.
struct DriftRow {
  int sample = 0;
  double drift_reactive = 0;
  Eigen::VectorXd drift_bath;
  Eigen::VectorXd start;
};

struct DriftReport {
  std::vector<DriftRow> rows;
  double median_reactive_drift = 0;
};

// Samples initial conditions uniformly in a ball of the given radius around
// the saddle, integrates the full dynamics, and tracks I and J_k through the
// normal form transformation (the truncation test of the surfaces' validity).
// Saddle trajectories leave the neighbourhood exponentially fast, and the
// integrals are only meaningful inside it, so the drift is measured along
// the initial segment with |z - z_saddle| <= tracking_radius (default twice
// the sampling radius).
DriftReport validate_invariants(const SystemSpec& spec, const NormalFormResult& nf,
                                int n_samples, double radius, double t_max,
                                std::uint64_t seed = 20250809, double rel_tol = 1e-10,
                                double tracking_radius = 0.0);

enum class ManifoldBranch { UnstableForward, UnstableBackward, StableForward, StableBackward };

struct ManifoldSeed {
  Eigen::VectorXd nf_point;
  Eigen::VectorXd physical_point;
};

struct GlobalizedManifold {
  std::vector<ManifoldSeed> seeds;
  std::vector<Trajectory> trajectories;  // one per seed, ordered by seed index
};

// Seeds trajectories on the NHIM energy shell displaced by epsilon into the
// chosen branch, maps them to physical coordinates, and integrates forward
// (unstable branches) or backward (stable branches) in time.
GlobalizedManifold globalize_manifold(const SystemSpec& spec, const NormalFormResult& nf,
                                      double E, ManifoldBranch branch, double epsilon,
                                      int n_seeds, double t_span, double seed_tol = 1e-4,
                                      std::uint64_t seed = 20250809);

}  // namespace saddlescope

#endif
