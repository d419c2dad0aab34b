#include "eo/rational.hpp"

#include <stdexcept>

namespace eo {

Rat rat_parse(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  mpq_class value;
  if (value.set_str(text, 10) != 0)
    throw std::invalid_argument("bad rational literal: " + text);
  if (value.get_den() == 0) throw std::invalid_argument("zero denominator: " + text);
  value.canonicalize();
  return value;
}

std::string rat_str(const Rat& value) {
  // mpq_class(n, d) does not canonicalize on construction; normalize a copy
  // so printed values are always reduced.
  Rat v = value;
  v.canonicalize();
  return v.get_str();
}

Rat rat_pow(const Rat& base, long exp) {
  if (exp == 0) return Rat(1);
  if (base == 0) {
    if (exp < 0) throw std::invalid_argument("rat_pow: zero base with negative exponent");
    return Rat(0);
  }
  bool invert = exp < 0;
  unsigned long e = invert ? static_cast<unsigned long>(-exp) : static_cast<unsigned long>(exp);
  Rat out;
  mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), e);
  mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), e);
  out.canonicalize();
  if (invert) out = 1 / out;
  return out;
}

Rat binomial_general(long top, long k) {
  if (k < 0) return Rat(0);
  Rat out(1);
  for (long i = 0; i < k; ++i) {
    out *= Rat(top - i);
    out /= Rat(i + 1);
  }
  return out;
}

Int factorial(long n) {
  if (n < 0) throw std::invalid_argument("factorial of negative integer");
  Int out;
  mpz_fac_ui(out.get_mpz_t(), static_cast<unsigned long>(n));
  return out;
}

Int double_factorial(long n) {
  Int out(1);
  for (long k = n; k > 1; k -= 2) out *= k;
  return out;
}

}  // namespace eo
