#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eo/ratfun.hpp"

namespace eo {

// y(z) either as an explicit rational function or as jet data (a_k, b_k)
// defining the partial sums y^{(N)} = sum (a_k + z b_k)(1-z^2)^k that match
// y at z = +1 and z = -1 to high order.
struct YData {
  bool is_rational = true;
  RationalFunction y;      // when is_rational
  std::vector<Rat> ak;     // jet coefficients otherwise
  std::vector<Rat> bk;

  static YData rational(RationalFunction f) {
    YData d;
    d.is_rational = true;
    d.y = std::move(f);
    return d;
  }
  static YData jets(std::vector<Rat> a, std::vector<Rat> b) {
    YData d;
    d.is_rational = false;
    d.ak = std::move(a);
    d.bk = std::move(b);
    return d;
  }
  // Largest jet index stored (lists may have different lengths).
  int jet_depth() const;
};

// Genus-zero curve x = a + b(z + 1/z) with involution z -> 1/z and branch
// points +1, -1.
struct CurveSpec {
  Rat a;
  Rat b;
  YData y;
  std::string label;
};

// The fixed curve x = z^2, y = z with involution z -> -z and branch point 0.
struct AirySpec {};

// Rational values for the catalog parameters (m, c, z0, t, t4, gamma, u).
struct ParamBinding {
  std::map<std::string, Rat> values;

  bool has(const std::string& name) const { return values.count(name) != 0; }
  const Rat& get(const std::string& name) const;
};

// validate_curve report: named diagnostics plus the branch-point derivative
// data later stages rely on.
struct CurveDiag {
  bool ok = false;
  std::vector<std::string> errors;
  Rat y_prime_plus;    // y'(+1)
  Rat y_prime_minus;   // y'(-1)
  Rat x_second_plus;   // x''(+1) = 2b
  Rat x_second_minus;  // x''(-1) = -2b
};

CurveDiag validate_curve(const CurveSpec& spec);

// Jet lists reproducing the derivatives of y at both branch points up to
// order N; errors if y has a pole at either point.
YData jets_from_rational(const RationalFunction& y, int N);

// y^{(N)}(z) = sum_{k<=N} (a_k + z b_k)(1-z^2)^k as a polynomial; the jet
// lists must extend to index N.
RationalFunction partial_sum_y(const YData& jets, int N);

// Recursion kernel K(z0, z) = -[1/(z0-z) - 1/(z0-1/z)] / (2(ybar(z)-ybar(1/z)) x'(z))
// where ybar is y itself when rational and y^{(N)} otherwise.
struct Kernel {
  CurveSpec spec;
  int depth = 0;                // N used for ybar when y is jet data
  RationalFunction ybar;        // in the variable z (index 0)
  RationalFunction ydel;        // ybar(z) - ybar(1/z)
  RationalFunction xprime;      // b (1 - 1/z^2)

  // Scalar value of the displayed kernel formula at rational points.
  Rat eval_scalar(const Rat& z0v, const Rat& zv) const;
};

Kernel kernel(const CurveSpec& spec, int N);

// Instantiates one of the catalog presets: "monomial" (m), "ln", "ln+cz" (c),
// "q-deformed" (z0), "discrete-surfaces" (u), "quadrangulations" (gamma, t4).
CurveSpec catalog_instantiate(const std::string& name, const ParamBinding& binding);

// f(1/z) in the same variable.
RationalFunction subst_reciprocal(const RationalFunction& f, int var);

// Value of a constant rational function.
Rat rf_constant(const RationalFunction& f);

// Curve-spec JSON document round trip; rationals as "p/q" strings,
// polynomials as ascending coefficient arrays.
CurveSpec curve_from_json(const std::string& text);
std::string curve_to_json(const CurveSpec& spec);

// Stable 64-bit FNV-1a hex digest of the mathematical content (label
// excluded); keys disk-cache entries.
std::string curve_fingerprint(const CurveSpec& spec);

}  // namespace eo
