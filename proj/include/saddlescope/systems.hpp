#ifndef SADDLESCOPE_SYSTEMS_HPP
#define SADDLESCOPE_SYSTEMS_HPP

#include <Eigen/Dense>
#include <optional>
#include <variant>
#include <vector>

#include "saddlescope/polynomial.hpp"

namespace saddlescope {

// Eckart barrier A y/(1+y) + B y/(1+y)^2 with y = exp((q+q0)/a) and
// q0 = a ln((B+A)/(B-A)).  B > A >= 0 guarantees the interior maximum at
// q = 0 with value (A+B)^2/(4B).
struct EckartPotential {
  double a;
  double A;
  double B;
};

// Morse well D_e (exp(-2 aM q) - 2 exp(-aM q)): minimum -D_e at q = 0.
struct MorsePotential {
  double De;
  double aM;
};

struct HarmonicPotential {
  double omega;
};

// Explicit Taylor coefficients about q = 0: V(q) = sum_k c_k q^k.
struct PolynomialPotential {
  std::vector<double> coefficients;
};

using Potential =
    std::variant<EckartPotential, MorsePotential, HarmonicPotential, PolynomialPotential>;

// Mutual kinetic coupling epsilon * sum_{i<j} p_i p_j.
struct KineticCoupling {
  double epsilon;
};

// General polynomial coupling in the phase variables.
struct PolynomialCoupling {
  PhasePolynomial poly;
};

using Coupling = std::variant<KineticCoupling, PolynomialCoupling>;

// A d-DoF model Hamiltonian H = 1/2 sum p_k^2 + sum_k V_k(q_k) + couplings,
// dimensionless atomic units, with the effective Planck constant attached.
struct SystemSpec {
  int dof = 1;
  double hbar_eff = 1.0;
  std::vector<Potential> potentials;  // one per coordinate
  std::vector<Coupling> couplings;

  void validate() const;
};

double potential_value(const SystemSpec& spec, int coordinate, double q);
double potential_derivative(const SystemSpec& spec, int coordinate, double q);

// Energy and Hamiltonian vector field in the physical coordinates
// z = (q_1..q_d, p_1..p_d).
double hamiltonian_value(const SystemSpec& spec, const Eigen::VectorXd& z);
Eigen::VectorXd hamiltonian_vector_field(const SystemSpec& spec, const Eigen::VectorXd& z);

// Taylor polynomial of H about `center`, grades 0..order; built by truncated
// univariate power-series arithmetic per potential family.
PhasePolynomial taylor_expand(const SystemSpec& spec, const Eigen::VectorXd& center, int order);

struct EquilibriumResult {
  Eigen::VectorXd point;     // phase-space point, momenta included
  Eigen::MatrixXd hessian;   // of H at the point, 2d x 2d
  double gradient_norm;
  int iterations;
};

// Damped Newton iteration on grad H = 0 starting from (guess_q, p = 0).
EquilibriumResult find_equilibrium(const SystemSpec& spec, const Eigen::VectorXd& guess_q);

// Parameters of the closed-form Eckart transmission at energy E:
// alpha = sqrt(E/C)/2, beta = sqrt((E-A)/C)/2, delta = sqrt((B-C)/C)/2,
// C = hbar_eff^2/(8 a^2) > 0.
struct EckartOracleParams {
  double alpha;
  double beta;
  double delta;
  double C;
};

// pre: E > A and B > C (delta real; C is tiny for the systems of interest).
EckartOracleParams eckart_oracle_params(double a, double A, double B, double hbar_eff, double E);

// Exact Eckart transmission coefficient; defined as 0 for E <= A by
// continuity from above.  Evaluated in an overflow-safe exponential form.
double eckart_exact_transmission(double a, double A, double B, double hbar_eff, double E);

// Morse level n; requires n + 1/2 < sqrt(2 De)/(aM hbar) (below dissociation).
double morse_levels(double De, double aM, double hbar_eff, int n);
int morse_level_count(double De, double aM, double hbar_eff);

// Exact CRP for an uncoupled Eckart (x) Morse (x) ... spec:
// N(E) = sum over bath quanta of T_exact(E - sum Morse levels).
double exact_crp_uncoupled(const SystemSpec& spec, double E);

// True when exact_crp_uncoupled is applicable (Eckart reaction coordinate,
// Morse baths, zero coupling).
bool has_uncoupled_crp_oracle(const SystemSpec& spec);

}  // namespace saddlescope

#endif
