#ifndef SADDLESCOPE_PHASE_SPACE_HPP
#define SADDLESCOPE_PHASE_SPACE_HPP

#include <Eigen/Dense>
#include <optional>

#include "saddlescope/action_polynomial.hpp"

namespace saddlescope {

// Values of the d integrals of motion at a normal form point: the reactive
// action I = q1 p1 and the bath actions J_k = (q_k^2 + p_k^2)/2 >= 0.
struct ActionValues {
  double reactive = 0;
  Eigen::VectorXd bath;
};

ActionValues momentum_map(const Eigen::VectorXd& nf_point);

enum class TrajectoryClass {
  ForwardReactive,
  BackwardReactive,
  NonreactiveReactant,
  NonreactiveProduct,
  Separatrix,
};

// Reactivity from the sign of I; the q1 branch distinguishes forward from
// backward crossings and the reactant from the product side.
TrajectoryClass classify_trajectory(const ActionValues& actions, int q1_sign,
                                    double separatrix_tol = 1e-12);

enum class Surface {
  DividingSurface,
  ForwardHemisphere,
  BackwardHemisphere,
  Nhim,
  StableManifold,
  UnstableManifold,
  StableForward,
  StableBackward,
  UnstableForward,
  UnstableBackward,
  ForwardCylinder,
  BackwardCylinder,
};

// Membership in the reaction-geometry surfaces, conditioned on the point
// lying on the energy shell of K_cnf within `energy_tol`.
bool surface_membership(const Eigen::VectorXd& nf_point, double E, Surface surface,
                        const ActionPolynomial& K_cnf, double hbar_eff, double eq_tol = 1e-9,
                        double energy_tol = 1e-6);

struct VolumeResult {
  double value = 0;
  double standard_error = 0;  // nonzero only for the quasi-Monte-Carlo path
};

// Smallest t >= 0 with K(0, J_base + t*direction) = E, walking up the
// monotone branch; raises ValidityError when the truncated table turns over
// below E (the shell leaves the validity region).
double shell_crossing(const ActionPolynomial& K, const Eigen::VectorXd& J_base,
                      const Eigen::VectorXd& direction, double E, double hbar_eff);

// Volume of {J in [0,inf)^{d-1} : K(0, J) <= E}: bisection for d=2, adaptive
// quadrature of the boundary curve for d=3, low-discrepancy sampling beyond.
VolumeResult action_volume(const ActionPolynomial& K, double E, double hbar_eff);

struct FluxResult {
  double flux = 0;         // f(E) = (2 pi)^{d-1} V(E)
  double weyl_count = 0;   // f(E) / (2 pi hbar)^{d-1}
  double volume = 0;
  double volume_standard_error = 0;
};

FluxResult flux_and_weyl(const ActionPolynomial& K, double E, double hbar_eff);

// Hamiltonian vector field of the normal form at a point (Lambda, Omega_k
// multipliers from the partial derivatives of K).
Eigen::VectorXd nf_vector_field(const ActionPolynomial& K, const Eigen::VectorXd& nf_point,
                                double hbar_eff);

}  // namespace saddlescope

#endif
