#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "eo/rational.hpp"

namespace eo {

// Monomial over at most kMaxVars variables, packed into one word. Byte 7
// holds the total degree so that raw integer comparison is a graded order;
// bytes 0..6 hold the per-variable exponents. Every exponent stays < 255.
inline constexpr int kMaxVars = 7;

struct Mono {
  std::uint64_t bits = 0;

  friend bool operator==(Mono a, Mono b) { return a.bits == b.bits; }
  friend bool operator<(Mono a, Mono b) { return a.bits < b.bits; }
};

Mono mono_one();
Mono mono_var(int var, unsigned exp = 1);
unsigned mono_exp(Mono m, int var);
unsigned mono_total_degree(Mono m);
Mono mono_mul(Mono a, Mono b);
// Exponent of `var` forced to `exp` (total degree re-derived).
Mono mono_with_exp(Mono m, int var, unsigned exp);

// Sparse multivariate polynomial with rational coefficients. Terms are kept
// sorted by descending Mono order and never store a zero coefficient.
class MultiPoly {
 public:
  std::vector<std::pair<Mono, Rat>> terms;

  MultiPoly() = default;
  static MultiPoly zero() { return {}; }
  static MultiPoly constant(const Rat& c);
  static MultiPoly variable(int var, unsigned exp = 1);
  static MultiPoly monomial(Mono m, const Rat& c);

  bool is_zero() const { return terms.empty(); }
  bool is_constant() const;
  // The constant term (zero if absent).
  Rat constant_term() const;

  MultiPoly operator-() const;
  MultiPoly operator+(const MultiPoly& rhs) const;
  MultiPoly operator-(const MultiPoly& rhs) const;
  MultiPoly operator*(const MultiPoly& rhs) const;
  MultiPoly& operator+=(const MultiPoly& rhs);
  MultiPoly& operator-=(const MultiPoly& rhs);
  friend bool operator==(const MultiPoly& a, const MultiPoly& b) { return a.terms == b.terms; }

  MultiPoly scaled(const Rat& c) const;
  MultiPoly pow(unsigned e) const;

  int degree_in(int var) const;          // -1 for the zero polynomial
  int total_degree() const;              // -1 for the zero polynomial
  bool uses_var(int var) const;
  int max_var() const;                   // largest variable index present, -1 if none

  Rat coeff(Mono m) const;
  // Coefficient of var^exp as a polynomial in the remaining variables.
  MultiPoly coeff_of(int var, unsigned exp) const;

  Rat eval(const std::vector<Rat>& point) const;
  // Substitutes one variable by a rational value.
  MultiPoly eval_var(int var, const Rat& value) const;
  // Substitutes var -> poly (univariate composition is the intended use).
  MultiPoly subst_var(int var, const MultiPoly& value) const;
  // Renames variables: exponent of var i moves to vars map[i].
  MultiPoly rename_vars(const std::array<int, kMaxVars>& map) const;

  // Contracts one variable against a weight table: sum_e coeff_of(var, e) * w[e].
  MultiPoly contract_var(int var, const std::vector<Rat>& weights) const;

  // Replaces exponent e of var by (deg - e); requires degree_in(var) <= deg.
  MultiPoly reverse_var(int var, unsigned deg) const;

  MultiPoly derivative(int var) const;

  // Exact division by (1 - v), (1 + v) or v; throws unless divisible.
  MultiPoly div_linear(int var, int root_kind) const;  // root_kind: +1 for (1-v), -1 for (1+v), 0 for v

  // Dense coefficient vector of a univariate polynomial in `var`.
  std::vector<Rat> dense(int var) const;
  static MultiPoly from_dense(int var, const std::vector<Rat>& coeffs);

  void normalize();  // sorts, merges, drops zeros
};

struct MonoHash {
  std::size_t operator()(Mono m) const { return std::hash<std::uint64_t>{}(m.bits); }
};

}  // namespace eo
