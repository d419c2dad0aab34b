#pragma once

#include <array>

#include "eo/multipoly.hpp"
#include "eo/ratfun.hpp"

namespace eo {

// Element of the localization of the polynomial ring at the multiplicative
// set generated by (1 - v), (1 + v) and v over all variables.  Denominators
// are tracked as factor exponents only, so no multivariate gcd runs in
// arithmetic; cancellation is synthetic division by the linear factors.
//
// Invariant: after every public operation the numerator is not divisible by
// any factor with a positive exponent, and the zero element has all
// exponents zero.
struct Frac {
  MultiPoly num;
  std::array<uint16_t, kMaxVars> one_minus{};
  std::array<uint16_t, kMaxVars> one_plus{};
  std::array<uint16_t, kMaxVars> bare{};

  Frac() = default;
  explicit Frac(const Rat& c) : num(MultiPoly::constant(c)) {}
  explicit Frac(MultiPoly p) : num(std::move(p)) {}

  bool is_zero() const { return num.is_zero(); }

  // Multiplies denominator factors (1-v)^em (1+v)^ep v^e0 for variable var.
  Frac over(int var, unsigned em, unsigned ep, unsigned e0 = 0) const;

  Frac operator-() const;
  Frac operator+(const Frac& rhs) const;
  Frac operator-(const Frac& rhs) const { return *this + (-rhs); }
  Frac operator*(const Frac& rhs) const;
  Frac scaled(const Rat& c) const;

  friend bool operator==(const Frac& a, const Frac& b) {
    return a.num == b.num && a.one_minus == b.one_minus &&
           a.one_plus == b.one_plus && a.bare == b.bare;
  }

  // Expands the factored denominator; for interop and tests.
  RationalFunction to_rational() const;

  void simplify();
};

inline Frac operator*(const Frac& a, const Rat& c) { return a.scaled(c); }

}  // namespace eo
