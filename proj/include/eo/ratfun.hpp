#pragma once

#include <vector>

#include "eo/multipoly.hpp"
#include "eo/series.hpp"

namespace eo {

// GCD over Q[x...], normalized so the leading graded-lex coefficient is 1.
MultiPoly poly_gcd(MultiPoly a, MultiPoly b);

// Exact quotient a / b; throws if b does not divide a.
MultiPoly poly_divexact(const MultiPoly& a, const MultiPoly& b);

// Quotient of multivariate polynomials in canonical form: num and den
// coprime, den nonzero with leading graded-lex coefficient 1.
struct RationalFunction {
  MultiPoly num;
  MultiPoly den = MultiPoly::constant(Rat(1));

  RationalFunction() = default;
  RationalFunction(const Rat& c) : num(MultiPoly::constant(c)) {}
  static RationalFunction make(MultiPoly num, MultiPoly den);
  static RationalFunction poly(MultiPoly p) { return make(std::move(p), MultiPoly::constant(Rat(1))); }
  static RationalFunction constant(const Rat& c) { return RationalFunction(c); }

  bool is_zero() const { return num.is_zero(); }
  bool is_poly() const { return den.is_constant(); }

  RationalFunction operator-() const;
  RationalFunction operator+(const RationalFunction& rhs) const;
  RationalFunction operator-(const RationalFunction& rhs) const;
  RationalFunction operator*(const RationalFunction& rhs) const;
  RationalFunction operator/(const RationalFunction& rhs) const;
  friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
    return a.num == b.num && a.den == b.den;
  }

  RationalFunction derivative(int var) const;
  // Substitutes a rational value for one variable; the denominator must not
  // vanish identically after substitution.
  RationalFunction eval_var(int var, const Rat& value) const;
  Rat eval(const std::vector<Rat>& point) const;
};

// Expansion point for the series operations below.
struct ExpansionPoint {
  bool at_infinity = false;
  Rat value;  // ignored when at_infinity

  static ExpansionPoint at(const Rat& v) { return {false, v}; }
  static ExpansionPoint infinity() { return {true, Rat(0)}; }
};

// Laurent expansion of f in `var` around a point. Coefficients are rational
// functions in the remaining variables. The local parameter is t = z - point
// (t = 1/z at infinity); returned orders run from -(pole order) through
// window - (pole order).
Series<RationalFunction> laurent_expand(const RationalFunction& f, int var,
                                        const ExpansionPoint& point, int window);

// Residue of f dz at the point (at infinity: of the pulled-back form).
RationalFunction residue_at(const RationalFunction& f, int var, const ExpansionPoint& point);

// Taylor coefficients c_0..c_max of a univariate f regular at 0.
std::vector<Rat> series_coefficients_at_zero(const RationalFunction& f, int var, int max_order);

enum class Involution { Reciprocal, Negation };  // z -> 1/z, z -> -z

// Pullback of the differential f(z) dz: f(sigma(z)) sigma'(z).
RationalFunction involution_pullback(const RationalFunction& f, int var, Involution sigma);

// Coefficient of z^(b-1) in z^k / (1-z^2)^(m+1): zero when b = k (mod 2),
// else C((b-k-1)/2 + m, m). Defined for any integer b.
Rat expansion_coefficient(long k, long m, long b);

}  // namespace eo
