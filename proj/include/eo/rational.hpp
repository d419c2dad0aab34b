#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace eo {

// Exact rational scalar. mpq_class keeps values in lowest terms with a
// positive denominator, which is the canonical form assumed everywhere.
using Rat = mpq_class;
using Int = mpz_class;

// Parses "p", "-p" or "p/q" with q > 0 after canonicalization.
Rat rat_parse(const std::string& text);

// Prints "p" or "p/q", matching rat_parse.
std::string rat_str(const Rat& value);

// base^exp for possibly negative exp; base must be nonzero when exp < 0.
Rat rat_pow(const Rat& base, long exp);

// Generalized binomial C(top, k) for integer top of any sign, k >= 0.
Rat binomial_general(long top, long k);

Int factorial(long n);

// Product n(n-2)(n-4)... down to 1 or 2; n <= 0 yields 1.
Int double_factorial(long n);

}  // namespace eo
