#ifndef SADDLESCOPE_POWER_SERIES_HPP
#define SADDLESCOPE_POWER_SERIES_HPP

#include <cmath>
#include <vector>

#include "saddlescope/errors.hpp"

namespace saddlescope {

// Dense univariate truncated power series, coefficient of u^k at index k.
// The workhorse behind Taylor expansion of the built-in potential families.
class PowerSeries {
 public:
  explicit PowerSeries(int order) : c_(order + 1, 0.0) {}
  static PowerSeries constant(int order, double v) {
    PowerSeries s(order);
    s.c_[0] = v;
    return s;
  }
  static PowerSeries variable(int order, double scale = 1.0) {
    PowerSeries s(order);
    if (order >= 1) s.c_[1] = scale;
    return s;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  double operator[](int k) const { return c_[k]; }
  double& operator[](int k) { return c_[k]; }

  friend PowerSeries operator+(const PowerSeries& a, const PowerSeries& b) {
    PowerSeries out(a.order());
    for (int k = 0; k <= a.order(); ++k) out.c_[k] = a.c_[k] + b.c_[k];
    return out;
  }
  friend PowerSeries operator-(const PowerSeries& a, const PowerSeries& b) {
    PowerSeries out(a.order());
    for (int k = 0; k <= a.order(); ++k) out.c_[k] = a.c_[k] - b.c_[k];
    return out;
  }
  friend PowerSeries operator*(double s, const PowerSeries& a) {
    PowerSeries out(a.order());
    for (int k = 0; k <= a.order(); ++k) out.c_[k] = s * a.c_[k];
    return out;
  }
  friend PowerSeries operator*(const PowerSeries& a, const PowerSeries& b) {
    PowerSeries out(a.order());
    for (int i = 0; i <= a.order(); ++i) {
      if (a.c_[i] == 0.0) continue;
      for (int j = 0; i + j <= a.order(); ++j) out.c_[i + j] += a.c_[i] * b.c_[j];
    }
    return out;
  }

  // a / b with b(0) != 0, by forward substitution.
  friend PowerSeries operator/(const PowerSeries& a, const PowerSeries& b) {
    if (std::abs(b.c_[0]) < 1e-300)
      throw DomainError("power series division by series with vanishing constant term");
    PowerSeries out(a.order());
    for (int k = 0; k <= a.order(); ++k) {
      double s = a.c_[k];
      for (int j = 1; j <= k; ++j) s -= b.c_[j] * out.c_[k - j];
      out.c_[k] = s / b.c_[0];
    }
    return out;
  }

  // exp(a) for a series with zero constant term; callers factor out e^{a_0}.
  static PowerSeries exp_of(const PowerSeries& a) {
    if (a.c_[0] != 0.0) throw StructuralError("exp_of expects a zero constant term");
    PowerSeries out(a.order());
    out.c_[0] = 1.0;
    // out' = a' * out  =>  (k+1) out_{k+1} = sum_j (j+1) a_{j+1} out_{k-j}
    for (int k = 0; k < a.order(); ++k) {
      double s = 0;
      for (int j = 0; j <= k; ++j) s += double(j + 1) * a.c_[j + 1] * out.c_[k - j];
      out.c_[k + 1] = s / double(k + 1);
    }
    return out;
  }

 private:
  std::vector<double> c_;
};

}  // namespace saddlescope

#endif
