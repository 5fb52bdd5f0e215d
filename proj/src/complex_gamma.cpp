#include "saddlescope/complex_gamma.hpp"

#include <cmath>
#include <numbers>

#include "saddlescope/errors.hpp"

namespace saddlescope {

namespace {

// Lanczos coefficients for g = 607/128, n = 15 (Godfrey's set, as used by
// Boost and GSL).
constexpr double kLanczosG = 607.0 / 128.0;
constexpr double kLanczos[15] = {
    0.99999999999999709182,     57.156235665862923517,     -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,   0.33994649984811888699e-4,
    0.46523628927048575665e-4,  -0.98374475304879564677e-4, 0.15808870322491248884e-3,
    -0.21026444172410488319e-3, 0.21743961811521264320e-3, -0.16431810653676389022e-3,
    0.84418223983852743293e-4,  -0.26190838401581408670e-4, 0.36899182659531622704e-5,
};

}  // namespace

std::complex<double> log_gamma(std::complex<double> z) {
  if (z.real() <= 0)
    throw DomainError("log_gamma: implemented for Re z > 0 only");
  // Lanczos: Gamma(z) = sqrt(2 pi) (z + g - 1/2)^{z - 1/2} e^{-(z + g - 1/2)} A(z)
  std::complex<double> a(kLanczos[0], 0.0);
  for (int k = 1; k < 15; ++k) a += kLanczos[k] / (z + double(k - 1));
  std::complex<double> t = z + (kLanczosG - 0.5);
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z - 0.5) * std::log(t) - t + std::log(a);
}

std::complex<double> complex_gamma(std::complex<double> z) { return std::exp(log_gamma(z)); }

std::complex<double> log_gamma_half_minus_ix(double x) {
  return log_gamma(std::complex<double>(0.5, -x));
}

}  // namespace saddlescope
