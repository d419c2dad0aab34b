#pragma once

#include <map>
#include <mutex>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "eo/curve.hpp"
#include "eo/frac.hpp"
#include "eo/series.hpp"

namespace eo {

// An n-variable differential of formal weight +1 in each dz_i; variables are
// indexed 0..n-1.
struct MultiDifferential {
  int n = 0;
  RationalFunction value;
};

// omega^g_n written over the fixed denominator prod_i (1-z_i^2)^p, or
// prod_i z_i^p on the Airy curve, with p = 2d+2 and d = 3g-3+n.
struct StableForm {
  int g = 0;
  int n = 0;
  int d = 0;
  int p = 0;
  bool airy = false;
  MultiPoly num;
};

// The unstable cases: (0,1) is ybar(z) x'(z); (0,2) is 1/(z_0 - z_1)^2.
MultiDifferential omega_unstable(const CurveSpec& spec, int g, int n);

// Expands the fixed denominator; the result is in lowest terms.
RationalFunction stable_to_rational(const StableForm& f);

// Deterministic JSON round trip used by the disk cache.
std::string stable_to_json(const StableForm& f);
StableForm stable_from_json(const std::string& text);

// Rewrites a differential over the canonical denominator and asserts every
// structural invariant (pole locations and orders, numerator degree,
// antisymmetry, vanishing residues, permutation symmetry).  Invariant
// failures are hard errors.
StableForm canonicalize_stable(const MultiDifferential& w, int g, int n);

// Recursion engine for one curve.  Stable results are memoized in memory
// and, when a cache directory is given, persisted one file per (g, n).
class Engine {
 public:
  explicit Engine(CurveSpec spec, std::string cache_dir = "");

  const StableForm& stable(int g, int n);
  MultiDifferential omega(int g, int n);

  const CurveSpec& curve() const { return spec_; }
  const std::string& fingerprint() const { return fingerprint_; }

 private:
  StableForm compute_stable(int g, int n);
  StableForm load_or_compute(int g, int n);

  CurveSpec spec_;
  std::string cache_dir_;
  std::string fingerprint_;
  std::map<std::pair<int, int>, StableForm> memo_;
  std::mutex mu_;
};

// Evaluates N^g_n(b), the coefficient of prod_i z_i^(b_i - 1) in omega^g_n
// divided by prod_i b_i, at one integer tuple without materializing the
// form itself.  Spectator variables of every integrand factor are
// contracted against their expansion weights up front, so the residues run
// over scalar series; the lower-complexity forms come from the engine.
class SampledEvaluator {
 public:
  explicit SampledEvaluator(Engine& engine);

  // The pair (g, n) must be stable and every entry of b positive.
  Rat n_value(int g, int n, const std::vector<long>& b);

 private:
  using Key = std::tuple<int, int, std::vector<long>>;

  const std::vector<Rat>& single_poly(const StableForm& f, const std::vector<long>& rest);
  const MultiPoly& double_poly(const StableForm& f, const std::vector<long>& rest);
  const Series<Rat>& invden(int alpha, int hi);

  Engine& eng_;
  std::map<Key, std::vector<Rat>> single_;
  std::map<Key, MultiPoly> double_;
  std::map<Key, Rat> values_;
  std::map<int, Series<Rat>> invden_;
  int invden_hi_ = -3;
  std::mutex mu_;
};

MultiDifferential compute_omega(const CurveSpec& spec, int g, int n);

// Same recursion on the curve x = z^2, y = z with branch point 0 and
// involution z -> -z.
StableForm compute_omega_airy_form(int g, int n);
MultiDifferential compute_omega_airy(int g, int n);

}  // namespace eo
