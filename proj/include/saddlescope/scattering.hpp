#ifndef SADDLESCOPE_SCATTERING_HPP
#define SADDLESCOPE_SCATTERING_HPP

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "saddlescope/action_polynomial.hpp"

namespace saddlescope {

// 2x2 local S-matrix of the reactive mode at action I (Gamma(1/2 - i I/h)
// prefactor with hyperbolic weights; block convention: index 0 = products,
// 1 = reactants).  Unitary for all real I.
Eigen::Matrix2cd smatrix_local(double I, double hbar_eff);

// Fermi-type transmission 1/(1 + exp(-2 pi I / hbar)) in overflow-safe form,
// and the complementary reflection with T + R = 1 in floating point.
double transmission(double I, double hbar_eff);
double reflection(double I, double hbar_eff);

enum class FluxSide { Reactants, Products };

// Expectation of the dividing-surface flux operator in the incoming states:
// +/- T(I) / (2 pi hbar).
double flux_expectation(double I, double hbar_eff, FluxSide side);

struct Channel {
  std::vector<int> n;  // bath quantum numbers (n_2, .., n_d)
  double action = 0;   // I_n(E)
  double transmission = 0;
};

// Solves K_op(I, hbar(n_k + 1/2)) = E for the reactive action by Newton
// iteration from the quadratic-order start.  Asserts dK/dI > 0 at the root.
double solve_channel_action(const ActionPolynomial& K_op, double E, std::span<const int> n,
                            double hbar_eff);

struct CrpOptions {
  double channel_cutoff = 1e-12;   // transmission below this closes a shell
  int consecutive_closed = 8;      // closed channels in weight order to stop
  std::optional<double> min_action;  // optional validity window on I_n
};

struct CrpResult {
  double value = 0;
  std::vector<Channel> channels;  // open + boundary channels in shell order
};

// Cumulative reaction probability N(E) = sum_n T(I_n(E)) over bath channels
// enumerated in increasing sum omega_k n_k shells.
CrpResult crp(const ActionPolynomial& K_op, double E, double hbar_eff, CrpOptions opts = {});

// Block-diagonal S-matrix: one local 2x2 block per channel.
std::vector<std::pair<Channel, Eigen::Matrix2cd>> smatrix_full(const ActionPolynomial& K_op,
                                                               double E, double hbar_eff,
                                                               CrpOptions opts = {});

// k = (2 pi Q_r)^{-1} integral e^{-beta E} N(E) dE over [e_min, e_max] by
// adaptive quadrature; raises ValidityError when the boundary mass estimate
// exceeds 1e-6 of the integral.
double thermal_rate(const std::function<double(double)>& crp_curve, double e_min, double e_max,
                    double beta, double reactant_partition);

struct ResonanceEntry {
  std::vector<int> n;  // (n_1, n_2, .., n_d)
  std::complex<double> energy;
  double lifetime = 0;  // hbar / |Im E|
  bool valid = true;    // Im E <= 0; violations reported, not dropped
};

// Gamov-Siegert resonances from the spectral substitution
// I -> -i hbar (n_1 + 1/2), J_k -> hbar (n_k + 1/2), sorted by |Im E|.
std::vector<ResonanceEntry> resonances(const ActionPolynomial& K_op, double hbar_eff,
                                       std::span<const int> n_max);

// |<Psi|Psi(t)>|^2 for the minimal-uncertainty state on the NHIM with fixed
// bath quanta, from the alternating resonance sum; t = 0 evaluates to the
// exact normalization.
std::vector<double> autocorrelation(const ActionPolynomial& K_op, double hbar_eff,
                                    std::span<const int> bath_n, std::span<const double> t_grid);

struct ConvergenceEstimate {
  std::vector<double> ratios;  // c_n / c_{n+1}
  double estimate = 0;         // min |ratio|
};

// Successive-ratio estimate of the hbar expansion's radius of convergence.
ConvergenceEstimate convergence_radius(std::span<const double> coefficients);

}  // namespace saddlescope

#endif
