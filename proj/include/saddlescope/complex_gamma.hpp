#ifndef SADDLESCOPE_COMPLEX_GAMMA_HPP
#define SADDLESCOPE_COMPLEX_GAMMA_HPP

#include <complex>

namespace saddlescope {

// log Gamma(z) for Re z > 0 via the Lanczos approximation (g = 607/128,
// 15 coefficients).  Accurate to ~1e-14 relative on the half-plane; the
// scattering code only evaluates it on the critical line Re z = 1/2.
std::complex<double> log_gamma(std::complex<double> z);

std::complex<double> complex_gamma(std::complex<double> z);

// Gamma(1/2 - i x), the combination entering the local S-matrix, evaluated
// in log form so the hyperbolic prefactors can be folded in without overflow.
std::complex<double> log_gamma_half_minus_ix(double x);

}  // namespace saddlescope

#endif
