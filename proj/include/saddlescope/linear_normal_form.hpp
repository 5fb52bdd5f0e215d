#ifndef SADDLESCOPE_LINEAR_NORMAL_FORM_HPP
#define SADDLESCOPE_LINEAR_NORMAL_FORM_HPP

#include <Eigen/Dense>

#include "saddlescope/polynomial.hpp"

namespace saddlescope {

// Linearization data at a saddle-center-...-center equilibrium: one real
// eigenvalue pair (+lambda, -lambda) and d-1 imaginary pairs (+i omega_k,
// -i omega_k), omega sorted ascending, plus the equilibrium energy.
struct LinearSpectrum {
  double lambda = 0;
  Eigen::VectorXd omega;  // length d-1
  double E0 = 0;

  double omega_sum() const { return omega.size() ? omega.sum() : 0.0; }
};

// Linear symplectic change of coordinates z_new = M z_old with M^T J M = J,
// bringing the quadratic Hamiltonian to lambda q1 p1 + sum (omega_k/2)(q_k^2+p_k^2).
struct LinearSymplecticMap {
  Eigen::MatrixXd M;
  Eigen::MatrixXd M_inv;
};

// Standard symplectic form in (q_1..q_d, p_1..p_d) ordering.
Eigen::MatrixXd symplectic_form(int dof);

// Extracts the symmetric matrix S with h2 = 1/2 z^T S z.
Eigen::MatrixXd quadratic_form_matrix(const PhasePolynomial& h2);

// Eigen-decomposes J*S and builds the normalizing map.  Throws
// SignatureError when the stability type is not saddle-center-...-center
// (naming the offending eigenvalues) and ValidityError when the constructed
// map fails the symplecticity or conjugation checks.
std::pair<LinearSpectrum, LinearSymplecticMap> linearize(const PhasePolynomial& h2);

}  // namespace saddlescope

#endif
