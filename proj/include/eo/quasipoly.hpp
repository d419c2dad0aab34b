#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "eo/recursion.hpp"

namespace eo {

// Lattice-point count polynomial attached to omega^g_n: one representative
// polynomial in u_i = b_i^2 per parity class k (k = number of odd entries,
// placed first), each of total degree at most d = 3g-3+n.
struct QuasiPolynomial {
  int g = 0;
  int n = 0;
  int d = 0;
  std::string fingerprint;
  std::map<int, MultiPoly> classes;
};

// N^g_n(b) for integer b_i >= 1: the coefficient of prod z_i^(b_i - 1) in
// the expansion of the form at the origin, divided by prod b_i.
Rat n_lattice_value(const StableForm& f, const std::vector<long>& b);

// Fits the parity-class representatives by exact collocation on a parity
// matched node grid and verifies the fit on held-out nodes.
QuasiPolynomial extract_quasi(const StableForm& f, const std::string& fingerprint = "");

// Same fit driven by an arbitrary exact value source (b_i >= 1 tuples);
// heldout_per_class controls how many verification nodes each parity class
// consumes from the source.
QuasiPolynomial extract_quasi_from(const std::function<Rat(const std::vector<long>&)>& value,
                                   int g, int n, const std::string& fingerprint = "",
                                   int heldout_per_class = 20);

// Evaluates the representative of the parity class of b; entries may be
// zero or negative (the class and u are taken from |b_i|).
Rat evaluate_quasi(const QuasiPolynomial& qp, const std::vector<long>& b);

std::string quasi_to_json(const QuasiPolynomial& qp);
QuasiPolynomial quasi_from_json(const std::string& text);

// Parses a closed-form expression over u1..u<nvars> and named rational
// parameters into a polynomial; +, -, *, /, ^ and parentheses, with division
// restricted to constant divisors.
MultiPoly parse_expression(const std::string& text, const std::map<std::string, Rat>& params,
                           int nvars);

struct MonomialDiff {
  std::vector<unsigned> exps;
  Rat expected;
  Rat actual;
};

struct ClassComparison {
  int k = 0;
  bool match = false;
  std::vector<MonomialDiff> diffs;
};

// Compares extracted representatives against closed-form expressions, one
// per parity class; per-monomial differences are reported for mismatches.
std::vector<ClassComparison> compare_closed_form(const QuasiPolynomial& qp,
                                                 const std::map<int, std::string>& closed,
                                                 const std::map<std::string, Rat>& params);

}  // namespace eo
