#include "saddlescope/linear_normal_form.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

namespace saddlescope {

Eigen::MatrixXd symplectic_form(int dof) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * dof, 2 * dof);
  J.topRightCorner(dof, dof) = Eigen::MatrixXd::Identity(dof, dof);
  J.bottomLeftCorner(dof, dof) = -Eigen::MatrixXd::Identity(dof, dof);
  return J;
}

Eigen::MatrixXd quadratic_form_matrix(const PhasePolynomial& h2) {
  const int d = h2.dof();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(2 * d, 2 * d);
  for (const auto& [m, c] : h2.terms()) {
    if (m.grade(d) != 2 || m.hbar_exp(d) != 0)
      throw StructuralError("quadratic_form_matrix: input must be a grade-2 phase polynomial");
    int i = -1, j = -1;
    for (int s = 0; s < 2 * d; ++s)
      for (unsigned e = m.slot(d, s); e > 0; --e) (i < 0 ? i : j) = s;
    if (i < 0 || j < 0) throw StructuralError("quadratic_form_matrix: malformed monomial");
    if (i == j) {
      S(i, i) += 2.0 * c;
    } else {
      S(i, j) += c;
      S(j, i) += c;
    }
  }
  return S;
}

std::pair<LinearSpectrum, LinearSymplecticMap> linearize(const PhasePolynomial& h2) {
  const int d = h2.dof();
  const Eigen::MatrixXd S = quadratic_form_matrix(h2);
  const Eigen::MatrixXd J = symplectic_form(d);
  const Eigen::MatrixXd A = J * S;

  Eigen::EigenSolver<Eigen::MatrixXd> solver(A);
  if (solver.info() != Eigen::Success)
    throw ValidityError("linearize: eigen decomposition failed");
  const auto evals = solver.eigenvalues();
  const auto evecs = solver.eigenvectors();

  double scale = 0;
  for (int i = 0; i < evals.size(); ++i) scale = std::max(scale, std::abs(evals[i]));
  const double tol = 1e-9 * std::max(scale, 1e-300);

  auto spectrum_string = [&] {
    std::ostringstream os;
    for (int i = 0; i < evals.size(); ++i)
      os << (i ? ", " : "") << evals[i].real() << (evals[i].imag() < 0 ? "-" : "+")
         << std::abs(evals[i].imag()) << "i";
    return os.str();
  };

  // Classify: indices of real eigenvalues and of +i omega representatives.
  std::vector<int> real_idx, center_idx;
  for (int i = 0; i < evals.size(); ++i) {
    const std::complex<double> ev = evals[i];
    if (std::abs(ev.imag()) <= tol && std::abs(ev.real()) > tol) {
      real_idx.push_back(i);
    } else if (std::abs(ev.real()) <= tol && ev.imag() > tol) {
      center_idx.push_back(i);
    } else if (std::abs(ev.real()) > tol && std::abs(ev.imag()) > tol) {
      throw SignatureError("linearize: complex quartet eigenvalue " +
                           std::to_string(ev.real()) + " + " + std::to_string(ev.imag()) +
                           "i; spectrum: " + spectrum_string());
    }
  }
  if (real_idx.size() != 2 || static_cast<int>(center_idx.size()) != d - 1)
    throw SignatureError(
        "linearize: expected saddle-center-...-center spectrum {+l, -l, +/-i w_k}, got " +
        spectrum_string());

  int plus_idx = evals[real_idx[0]].real() > 0 ? real_idx[0] : real_idx[1];
  int minus_idx = plus_idx == real_idx[0] ? real_idx[1] : real_idx[0];
  const double lambda = evals[plus_idx].real();
  if (lambda <= 0 || evals[minus_idx].real() >= 0 ||
      std::abs(lambda + evals[minus_idx].real()) > 1e-8 * std::max(1.0, lambda))
    throw SignatureError("linearize: real eigenvalues are not an opposite pair: " +
                         spectrum_string());

  std::sort(center_idx.begin(), center_idx.end(),
            [&](int a, int b) { return evals[a].imag() < evals[b].imag(); });

  // Columns of C: (q-directions | p-directions); z_old = C z_new.
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(2 * d, 2 * d);

  Eigen::VectorXd v_plus = evecs.col(plus_idx).real();
  Eigen::VectorXd v_imag_resid = evecs.col(plus_idx).imag();
  if (v_imag_resid.norm() > 1e-8 * v_plus.norm())
    throw ValidityError("linearize: saddle eigenvector is not real");
  int imax = 0;
  v_plus.cwiseAbs().maxCoeff(&imax);
  if (v_plus[imax] < 0) v_plus = -v_plus;
  v_plus.normalize();
  Eigen::VectorXd v_minus = evecs.col(minus_idx).real();
  double pairing = v_plus.dot(J * v_minus);
  if (std::abs(pairing) < 1e-12)
    throw ValidityError("linearize: degenerate symplectic pairing of saddle eigenvectors");
  v_minus /= pairing;
  C.col(0) = v_plus;
  C.col(d) = v_minus;

  Eigen::VectorXd omega(d - 1);
  for (int k = 0; k < d - 1; ++k) {
    omega[k] = evals[center_idx[k]].imag();
    Eigen::VectorXd a = evecs.col(center_idx[k]).real();
    Eigen::VectorXd b = evecs.col(center_idx[k]).imag();
    double sigma = a.dot(J * b);
    if (std::abs(sigma) < 1e-12)
      throw ValidityError("linearize: degenerate center eigenvector pairing");
    if (sigma < 0)
      throw SignatureError(
          "linearize: center pair with negative symplectic signature at omega = " +
          std::to_string(omega[k]));
    C.col(1 + k) = a / std::sqrt(sigma);
    C.col(d + 1 + k) = b / std::sqrt(sigma);
  }

  // M = C^{-1} via the symplectic inversion, exact for symplectic C.
  Eigen::MatrixXd M = J.transpose() * C.transpose() * J;

  double sympl_defect = (C.transpose() * J * C - J).cwiseAbs().maxCoeff();
  if (sympl_defect > 1e-12)
    throw ValidityError("linearize: symplecticity defect " + std::to_string(sympl_defect));

  // Conjugated quadratic part must match lambda q1 p1 + sum (w_k/2)(q_k^2+p_k^2).
  PhasePolynomial conj = h2.linear_substitute(C);
  PhasePolynomial target(d, h2.truncation_order());
  {
    std::vector<PhasePolynomial::Term> terms;
    Monomial qp;
    qp.set_slot(d, 0, 1);
    qp.set_slot(d, d, 1);
    terms.emplace_back(qp, lambda);
    for (int k = 1; k < d; ++k) {
      Monomial qq, pp;
      qq.set_slot(d, k, 2);
      pp.set_slot(d, d + k, 2);
      terms.emplace_back(qq, 0.5 * omega[k - 1]);
      terms.emplace_back(pp, 0.5 * omega[k - 1]);
    }
    target = PhasePolynomial::from_terms(d, h2.truncation_order(), std::move(terms));
  }
  double conj_defect = (conj - target).max_abs_coefficient();
  if (conj_defect > 1e-10 * std::max(1.0, lambda + omega.sum()))
    throw ValidityError("linearize: conjugated h2 deviates from normal form by " +
                        std::to_string(conj_defect));

  LinearSpectrum spectrum;
  spectrum.lambda = lambda;
  spectrum.omega = omega;
  return {spectrum, LinearSymplecticMap{M, C}};
}

}  // namespace saddlescope
