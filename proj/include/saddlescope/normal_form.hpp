#ifndef SADDLESCOPE_NORMAL_FORM_HPP
#define SADDLESCOPE_NORMAL_FORM_HPP

#include <Eigen/Dense>
#include <vector>

#include "saddlescope/action_polynomial.hpp"
#include "saddlescope/brackets.hpp"
#include "saddlescope/linear_normal_form.hpp"
#include "saddlescope/polynomial.hpp"
#include "saddlescope/systems.hpp"

namespace saddlescope {

inline constexpr int kMaxNormalFormOrder = 12;

struct NormalFormResult {
  int dof = 1;
  int order = 2;
  double hbar_eff = 1.0;
  LinearSpectrum spectrum;
  Eigen::VectorXd shift;          // equilibrium point in physical coordinates
  LinearSymplecticMap map;        // linear normalization
  std::vector<PhasePolynomial> generators;  // W_3 .. W_order (zero entries kept)
  ActionPolynomial K_cnf;         // classical table, j = 0 throughout
  ActionPolynomial K_qnf_symbol;  // Weyl symbol, populated by qnf
  ActionPolynomial K_qnf_op;      // operator-ordered table, populated by qnf
  bool quantum = false;
};

// Splits a homogeneous grade-n term into generator and normalized part by
// diagonalizing ad_{H_2} in complexified center coordinates
// x_k = (q_k - i p_k)/sqrt(2); the eigenvalue on a monomial is
// lambda(beta_1-alpha_1) + i sum omega_k (b_k - a_k).  Monomials whose
// eigenvalue is structurally zero form the normalized part; the rest divide
// into the generator.  A nonzero eigenvalue below `resonance_tol` raises
// SmallDivisorError naming the monomial.
std::pair<PhasePolynomial, PhasePolynomial> solve_homological(const PhasePolynomial& h_n,
                                                              const LinearSpectrum& spectrum,
                                                              BracketKind mode,
                                                              double resonance_tol = -1);

// Verifies the nonresonance condition |m . omega| > tol for all integer
// vectors 0 < |m|_1 <= scan_bound.
void check_nonresonant(const LinearSpectrum& spectrum, int scan_bound, double tol);

// Rewrites a kernel element of ad_{H_2} (a polynomial in q1 p1 and the
// (q_k^2+p_k^2)/2) as an action polynomial.
ActionPolynomial kernel_to_actions(const PhasePolynomial& kernel);

// Classical normal form to even order N (2 <= N <= 12).
NormalFormResult cnf(const SystemSpec& spec, int N);

// Quantum normal form; also carries the classical table for comparison.
NormalFormResult qnf(const SystemSpec& spec, int N);

enum class NfDirection { ToNormalForm, FromNormalForm };

// Truncated coordinate transformation between physical and normal form
// coordinates: shift -> M -> time-one generator flows (and the inverse
// chain), each flow evaluated through the truncated Lie series on the
// coordinate functions.  Builds the flow polynomials once.
class NfTransformer {
 public:
  explicit NfTransformer(const NormalFormResult& result);

  Eigen::VectorXd to_normal_form(const Eigen::VectorXd& physical_point) const;
  Eigen::VectorXd from_normal_form(const Eigen::VectorXd& nf_point) const;

 private:
  const NormalFormResult& result_;
  std::vector<std::vector<PhasePolynomial>> forward_maps_;   // per generator
  std::vector<std::vector<PhasePolynomial>> backward_maps_;
};

Eigen::VectorXd nf_transform(const NormalFormResult& result, const Eigen::VectorXd& point,
                             NfDirection direction);

}  // namespace saddlescope

#endif
