#ifndef SADDLESCOPE_MONOMIAL_HPP
#define SADDLESCOPE_MONOMIAL_HPP

#include <cstdint>
#include <span>
#include <string>

#include "saddlescope/errors.hpp"

namespace saddlescope {

// A monomial q_1^{a_1}..q_d^{a_d} p_1^{b_1}..p_d^{b_d} hbar^j over phase
// space and the effective Planck constant.  Exponents are nibble-packed into
// a single 64-bit key, q_1 in the most significant nibble, so that unsigned
// integer comparison coincides with lexicographic order on (alpha, beta, j).
//
// The same key type doubles as the index of action monomials
// I^{a_1} J_2^{a_2}..J_d^{a_d} hbar^j, with the beta nibbles unused.
class Monomial {
 public:
  static constexpr int kMaxDof = 7;        // 2*7+1 nibbles = 60 bits
  static constexpr unsigned kMaxExponent = 15;

  Monomial() = default;

  static Monomial from_exponents(int dof, std::span<const int> alpha,
                                 std::span<const int> beta, int hbar_power) {
    Monomial m;
    for (int k = 0; k < dof; ++k) m.set_slot(dof, k, alpha[k]);
    for (int k = 0; k < dof; ++k) m.set_slot(dof, dof + k, beta[k]);
    m.set_slot(dof, 2 * dof, hbar_power);
    return m;
  }

  std::uint64_t key() const { return bits_; }
  static Monomial from_key(std::uint64_t key) {
    Monomial m;
    m.bits_ = key;
    return m;
  }

  // Slots are indexed 0..2*dof: q_1..q_d, p_1..p_d, hbar.
  unsigned slot(int dof, int i) const {
    return static_cast<unsigned>(bits_ >> shift(dof, i)) & 0xFu;
  }
  unsigned q_exp(int dof, int k) const { return slot(dof, k); }
  unsigned p_exp(int dof, int k) const { return slot(dof, dof + k); }
  unsigned hbar_exp(int dof) const { return slot(dof, 2 * dof); }

  void set_slot(int dof, int i, int value) {
    if (value < 0 || value > static_cast<int>(kMaxExponent))
      throw StructuralError("monomial exponent out of range: " + std::to_string(value));
    bits_ = (bits_ & ~(std::uint64_t{0xF} << shift(dof, i))) |
            (static_cast<std::uint64_t>(value) << shift(dof, i));
  }

  // Quantum grading |alpha| + |beta| + 2 j.
  int grade(int dof) const {
    int g = 0;
    for (int i = 0; i < 2 * dof; ++i) g += static_cast<int>(slot(dof, i));
    return g + 2 * static_cast<int>(hbar_exp(dof));
  }

  // Total (q,p)-degree, ignoring hbar.
  int qp_degree(int dof) const {
    int g = 0;
    for (int i = 0; i < 2 * dof; ++i) g += static_cast<int>(slot(dof, i));
    return g;
  }

  bool is_unit() const { return bits_ == 0; }

  // Exponent-wise sum; valid only when the result stays within nibble range,
  // which truncation guarantees for grade-bounded operands.
  Monomial times(const Monomial& other) const {
    Monomial m;
    m.bits_ = bits_ + other.bits_;
    return m;
  }

  Monomial with_slot_delta(int dof, int i, int delta) const {
    Monomial m = *this;
    m.set_slot(dof, i, static_cast<int>(slot(dof, i)) + delta);
    return m;
  }

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.bits_ == b.bits_; }
  friend bool operator<(const Monomial& a, const Monomial& b) { return a.bits_ < b.bits_; }

  std::string to_string(int dof) const {
    std::string s;
    auto append = [&](const std::string& name, unsigned e) {
      if (e == 0) return;
      if (!s.empty()) s += " ";
      s += name;
      if (e > 1) s += "^" + std::to_string(e);
    };
    for (int k = 0; k < dof; ++k) append("q" + std::to_string(k + 1), q_exp(dof, k));
    for (int k = 0; k < dof; ++k) append("p" + std::to_string(k + 1), p_exp(dof, k));
    append("hbar", hbar_exp(dof));
    return s.empty() ? "1" : s;
  }

  static void check_dof(int dof) {
    if (dof < 1 || dof > kMaxDof)
      throw StructuralError("dof must be in [1, " + std::to_string(kMaxDof) +
                            "], got " + std::to_string(dof));
  }

 private:
  static int shift(int dof, int i) { return 4 * (2 * dof - i); }

  std::uint64_t bits_ = 0;
};

}  // namespace saddlescope

#endif
