#include "eo/recursion.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "eo/series.hpp"

namespace eo {

namespace {

// Overall sign of the residue sum, fixed once by the three-point
// normalization omega^0_3; every branch-point contribution uses it.
constexpr int kGlobalSign = 1;

// (alpha + t)^M truncated at order hi; exact beyond M when M >= 0, a
// truncated binomial series when M < 0.
Series<Rat> shifted_power(int alpha, int M, int hi) {
  Series<Rat> out = series_zero<Rat>(0, hi);
  int top = M >= 0 ? std::min(M, hi) : hi;
  for (int k = 0; k <= top; ++k) {
    Rat c = binomial_general(M, k);
    if (alpha < 0 && ((M - k) & 1)) c = -c;
    out.set(k, c);
  }
  return out;
}

// (1 - z^2)^e around z = alpha + t; the base is -2 alpha t - t^2.
Series<Rat> one_minus_z2_pow(int alpha, long e, int hi) {
  int blen = std::max<long>(2, hi - e + 2);
  Series<Rat> base = series_zero<Rat>(1, blen);
  base.set(1, Rat(-2 * alpha));
  base.set(2, Rat(-1));
  return series_pow_int(base, e, static_cast<int>(e), hi);
}

// 1/(z0 - alpha)^e as an element of the localized ring in the variable z0.
Frac z0_pow_frac(int alpha, unsigned e) {
  if (alpha == 1) {
    Rat c = (e & 1) ? Rat(-1) : Rat(1);
    return Frac(MultiPoly::constant(c)).over(0, e, 0);
  }
  return Frac(MultiPoly::constant(Rat(1))).over(0, 0, e);
}

// One factor of a residue integrand.  Stable factors expand a memoized form
// with its first one or two variables bound to the flowing point z (and its
// involution image); Pair factors are the two-point cases written out
// directly.  Hatted slots include the jacobian of the involution.
struct Factor {
  enum class Kind { kStableZ, kStableZhat, kStableZZ, kPairZ, kPairZhat, kPairZZ };
  Kind kind = Kind::kPairZZ;
  const StableForm* form = nullptr;
  std::vector<int> spect;  // output variables bound to the non-slot arguments
  int j = -1;              // spectator variable of a Pair factor
  int val = 0;             // lower bound for the local valuation
};

struct Term {
  std::vector<Factor> fs;
  int val = 0;
};

Frac attach_spect(MultiPoly q, const std::vector<int>& spect, int p, bool airy) {
  Frac out(std::move(q));
  for (int sv : spect) {
    unsigned up = static_cast<unsigned>(p);
    out = airy ? out.over(sv, 0, 0, up) : out.over(sv, up, up, 0);
  }
  return out;
}

std::array<int, kMaxVars> slot_rename_map(const std::vector<int>& spect, int slots) {
  std::array<int, kMaxVars> map{};
  for (int v = 0; v < kMaxVars; ++v) map[v] = v;
  for (std::size_t i = 0; i < spect.size(); ++i) map[slots + static_cast<int>(i)] = spect[i];
  return map;
}

// Expansion of a stable factor with one slot variable; hatted slots read the
// form at 1/z (or -z on the Airy curve) and carry the jacobian.
Series<Frac> stable_single_series(const Factor& f, bool hatted, int alpha, int hi, bool airy) {
  const StableForm& F = *f.form;
  int p = F.p;
  auto map = slot_rename_map(f.spect, 1);
  Series<Frac> out = series_zero<Frac>(-p, hi);
  int deg = F.num.degree_in(0);
  if (airy) {
    for (int o = -p; o <= hi; ++o) {
      int e = o + p;
      if (e > deg) break;
      MultiPoly q = F.num.coeff_of(0, static_cast<unsigned>(e));
      if (q.is_zero()) continue;
      q = q.rename_vars(map);
      if (hatted) q = -q;
      out.set(o, attach_spect(std::move(q), f.spect, p, true));
    }
    return out;
  }
  std::map<int, MultiPoly> groups;
  for (int e = 0; e <= deg; ++e) {
    MultiPoly q = F.num.coeff_of(0, static_cast<unsigned>(e));
    if (q.is_zero()) continue;
    int m = hatted ? 2 * p - 2 - e : e;
    groups[m] += q.rename_vars(map);
  }
  Series<Rat> sp = one_minus_z2_pow(alpha, -p, hi);
  std::vector<MultiPoly> acc(static_cast<std::size_t>(hi + p + 1));
  for (const auto& [m, q] : groups) {
    Series<Rat> pm = shifted_power(alpha, m, hi + p);
    for (int o = -p; o <= hi; ++o) {
      Rat s = series_conv_coeff<Rat, Rat, Rat>(pm, sp, o);
      if (s != 0) acc[static_cast<std::size_t>(o + p)] += q.scaled(s);
    }
  }
  for (int o = -p; o <= hi; ++o) {
    MultiPoly& q = acc[static_cast<std::size_t>(o + p)];
    if (q.is_zero()) continue;
    if (hatted) q = -q;
    out.set(o, attach_spect(std::move(q), f.spect, p, false));
  }
  return out;
}

// Expansion of a stable factor with both slot variables bound to z and its
// involution image; carries one jacobian factor.
Series<Frac> stable_double_series(const Factor& f, int alpha, int hi, bool airy) {
  const StableForm& F = *f.form;
  int p = F.p;
  auto map = slot_rename_map(f.spect, 2);
  int lo = -2 * p;
  Series<Frac> out = series_zero<Frac>(lo, hi);
  std::map<int, MultiPoly> groups;
  int deg0 = F.num.degree_in(0);
  for (int e0 = 0; e0 <= deg0; ++e0) {
    MultiPoly c0 = F.num.coeff_of(0, static_cast<unsigned>(e0));
    if (c0.is_zero()) continue;
    int deg1 = c0.degree_in(1);
    for (int e1 = 0; e1 <= deg1; ++e1) {
      MultiPoly q = c0.coeff_of(1, static_cast<unsigned>(e1));
      if (q.is_zero()) continue;
      int m = airy ? e0 + e1 - 2 * p : e0 + 2 * p - 2 - e1;
      groups[m] += q.rename_vars(map);
    }
  }
  if (airy) {
    for (auto& [m, q] : groups) {
      if (m < lo || m > hi) continue;
      out.set(m, attach_spect(-q, f.spect, p, true));
    }
    return out;
  }
  Series<Rat> sp = one_minus_z2_pow(alpha, -2 * p, hi);
  std::vector<MultiPoly> acc(static_cast<std::size_t>(hi - lo + 1));
  for (const auto& [m, q] : groups) {
    Series<Rat> pm = shifted_power(alpha, m, hi - lo);
    for (int o = lo; o <= hi; ++o) {
      Rat s = series_conv_coeff<Rat, Rat, Rat>(pm, sp, o);
      if (s != 0) acc[static_cast<std::size_t>(o - lo)] += q.scaled(s);
    }
  }
  for (int o = lo; o <= hi; ++o) {
    MultiPoly& q = acc[static_cast<std::size_t>(o - lo)];
    if (q.is_zero()) continue;
    out.set(o, attach_spect(-q, f.spect, p, false));
  }
  return out;
}

Series<Frac> factor_series(const Factor& f, int alpha, int hi, bool airy) {
  using Kind = Factor::Kind;
  switch (f.kind) {
    case Kind::kStableZ:
      return stable_single_series(f, false, alpha, hi, airy);
    case Kind::kStableZhat:
      return stable_single_series(f, true, alpha, hi, airy);
    case Kind::kStableZZ:
      return stable_double_series(f, alpha, hi, airy);
    case Kind::kPairZ: {
      // 1/(z - z_j)^2 around the branch point.
      Series<Frac> out = series_zero<Frac>(0, hi);
      for (int k = 0; k <= hi; ++k) {
        unsigned e = static_cast<unsigned>(k + 2);
        if (airy) {
          out.set(k, Frac(MultiPoly::constant(Rat(k + 1))).over(f.j, 0, 0, e));
        } else if (alpha == 1) {
          Rat c = Rat(k + 1) * ((k & 1) ? -1 : 1);
          out.set(k, Frac(MultiPoly::constant(c)).over(f.j, e, 0));
        } else {
          out.set(k, Frac(MultiPoly::constant(Rat(k + 1))).over(f.j, 0, e));
        }
      }
      return out;
    }
    case Kind::kPairZhat: {
      // The hatted two-point factor with jacobian: -1/(1 - z z_j)^2, or
      // -1/(z + z_j)^2 on the Airy curve.
      Series<Frac> out = series_zero<Frac>(0, hi);
      for (int k = 0; k <= hi; ++k) {
        unsigned e = static_cast<unsigned>(k + 2);
        if (airy) {
          Rat c = Rat(k + 1) * ((k & 1) ? 1 : -1);
          out.set(k, Frac(MultiPoly::constant(c)).over(f.j, 0, 0, e));
        } else {
          MultiPoly q = MultiPoly::monomial(mono_var(f.j, static_cast<unsigned>(k)), Rat(-(k + 1)));
          out.set(k, alpha == 1 ? Frac(std::move(q)).over(f.j, e, 0)
                                : Frac(std::move(q)).over(f.j, 0, e));
        }
      }
      return out;
    }
    case Kind::kPairZZ: {
      // omega^0_2(z, zhat) with jacobian: -1/(1 - z^2)^2, or -1/(4 z^2).
      Series<Frac> out = series_zero<Frac>(-2, hi);
      if (airy) {
        out.set(-2, Frac(MultiPoly::constant(Rat(-1) / 4)));
        return out;
      }
      Series<Rat> s = one_minus_z2_pow(alpha, -2, hi);
      for (int o = -2; o <= hi; ++o) {
        Rat c = -s.at(o);
        if (c != 0) out.set(o, Frac(MultiPoly::constant(c)));
      }
      return out;
    }
  }
  throw std::runtime_error("factor_series: unreachable");
}

using SubFn = std::function<const StableForm&(int, int)>;

Factor make_slot_factor(int g1, std::vector<int> vars, bool hatted, const SubFn& sub) {
  Factor f;
  if (g1 == 0 && vars.size() == 1) {
    f.kind = hatted ? Factor::Kind::kPairZhat : Factor::Kind::kPairZ;
    f.j = vars[0];
    f.val = 0;
    return f;
  }
  const StableForm& F = sub(g1, static_cast<int>(vars.size()) + 1);
  f.kind = hatted ? Factor::Kind::kStableZhat : Factor::Kind::kStableZ;
  f.form = &F;
  f.spect = std::move(vars);
  f.val = -F.p;
  return f;
}

// All residue integrand terms: the lower-complexity invariant with two slot
// arguments, then every split into two factors.  Splits with a one-point
// factor are excluded.
std::vector<Term> enumerate_terms(int g, int n, const SubFn& sub) {
  std::vector<int> svars;
  for (int v = 1; v < n; ++v) svars.push_back(v);
  std::vector<Term> terms;
  if (g >= 1) {
    Term t;
    if (g == 1 && n == 1) {
      Factor f;
      f.kind = Factor::Kind::kPairZZ;
      f.val = -2;
      t.fs.push_back(std::move(f));
    } else {
      const StableForm& F = sub(g - 1, n + 1);
      Factor f;
      f.kind = Factor::Kind::kStableZZ;
      f.form = &F;
      f.spect = svars;
      f.val = -2 * F.p;
      t.fs.push_back(std::move(f));
    }
    t.val = t.fs[0].val;
    terms.push_back(std::move(t));
  }
  int nm = n - 1;
  for (unsigned mask = 0; mask < (1u << nm); ++mask) {
    std::vector<int> I, J;
    for (int i = 0; i < nm; ++i) ((mask >> i) & 1 ? I : J).push_back(svars[static_cast<std::size_t>(i)]);
    for (int g1 = 0; g1 <= g; ++g1) {
      int g2 = g - g1;
      if (g1 == 0 && I.empty()) continue;
      if (g2 == 0 && J.empty()) continue;
      Term t;
      t.fs.push_back(make_slot_factor(g1, I, false, sub));
      t.fs.push_back(make_slot_factor(g2, J, true, sub));
      t.val = t.fs[0].val + t.fs[1].val;
      terms.push_back(std::move(t));
    }
  }
  return terms;
}

// Inverse of the kernel denominator 2 ybar_delta x' at z = alpha + t, with
// orders [-2, KH - 1].
Series<Rat> kernel_invden(const Kernel& kern, int alpha, int KH) {
  int W = KH + 3;
  auto lift = [](const Series<RationalFunction>& s) {
    Series<Rat> out = series_zero<Rat>(s.lo, s.hi());
    for (int k = s.lo; k <= s.hi(); ++k) out.set(k, rf_constant(s.at(k)));
    return out;
  };
  ExpansionPoint pt = ExpansionPoint::at(Rat(alpha));
  Series<Rat> ydel = lift(laurent_expand(kern.ydel, 0, pt, W));
  Series<Rat> xp = lift(laurent_expand(kern.xprime, 0, pt, W));
  if (ydel.window_zero() || ydel.valuation() != 1 || xp.window_zero() || xp.valuation() != 1)
    throw std::runtime_error("kernel series: branch point is not a simple critical point");
  Series<Rat> den = series_scale(series_mul(ydel, xp, 2, KH + 3), Rat(2));
  return series_inverse(den, KH + 2);
}

// K(z0, z) expanded at z = alpha + t, coefficients in the localized ring in
// z0.  The window [-1, KH] is enough for every integrand term by valuation
// accounting done by the caller.
Series<Frac> two_branch_kernel_series(const Kernel& kern, int alpha, int KH) {
  Series<Rat> invden = kernel_invden(kern, alpha, KH);
  // 1/(z0 - z) - 1/(z0 - 1/z): both expand geometrically in powers of the
  // distance to alpha, and the order-zero parts cancel.
  Series<Frac> numer = series_zero<Frac>(1, KH + 2);
  Series<Rat> v = series_zero<Rat>(1, KH + 2);  // 1/z - alpha
  for (int k = 1; k <= KH + 2; ++k) v.set(k, alpha == 1 ? Rat((k & 1) ? -1 : 1) : Rat(-1));
  std::vector<Frac> s2(static_cast<std::size_t>(KH + 3));
  Series<Rat> cur = series_zero<Rat>(0, KH + 2);
  cur.set(0, Rat(1));
  for (int k = 0; k <= KH + 2; ++k) {
    if (k > 0) cur = series_mul(cur, v, k, KH + 2);
    if (cur.window_zero()) break;
    Frac pw = z0_pow_frac(alpha, static_cast<unsigned>(k + 1));
    for (int j = std::max(k, 1); j <= KH + 2; ++j) {
      const Rat& c = cur.at(j);
      if (c != 0) s2[static_cast<std::size_t>(j)] = s2[static_cast<std::size_t>(j)] + pw.scaled(c);
    }
  }
  for (int j = 1; j <= KH + 2; ++j)
    numer.set(j, z0_pow_frac(alpha, static_cast<unsigned>(j + 1)) - s2[static_cast<std::size_t>(j)]);
  Series<Frac> out = series_zero<Frac>(-1, KH);
  for (int k = -1; k <= KH; ++k) {
    Frac c = series_conv_coeff<Frac, Frac, Rat>(numer, invden, k);
    out.set(k, c.scaled(Rat(-kGlobalSign)));
  }
  return out;
}

// The Airy kernel -[1/(z0-z) - 1/(z0+z)] / (8 z^2) expands exactly: only odd
// orders appear.
Series<Frac> airy_kernel_series(int KH) {
  Series<Frac> out = series_zero<Frac>(-1, KH);
  Rat c = Rat(-kGlobalSign) / 4;
  for (int k = -1; k <= KH; k += 2)
    out.set(k, Frac(MultiPoly::constant(c)).over(0, 0, 0, static_cast<unsigned>(k + 3)));
  return out;
}

// Residue weight w[k] = Res_{z=alpha} z^k (1-z^2)^{-p} dz, used to verify the
// vanishing-residue invariant by contraction.
std::vector<Rat> residue_weights(int alpha, int p, int maxdeg) {
  std::vector<Rat> w(static_cast<std::size_t>(maxdeg + 1));
  Rat pref = rat_pow(Rat(-2 * alpha), -p);
  Rat half_alpha = Rat(alpha) / 2;
  for (int k = 0; k <= maxdeg; ++k) {
    Rat acc(0);
    for (int i = 0; i < p && i <= k; ++i) {
      Rat bk = binomial_general(k, i);
      if (bk == 0) continue;
      if (alpha < 0 && ((k - i) & 1)) bk = -bk;
      acc += bk * binomial_general(-p, p - 1 - i) * rat_pow(half_alpha, p - 1 - i);
    }
    w[static_cast<std::size_t>(k)] = pref * acc;
  }
  return w;
}

void assert_canonical(const StableForm& f) {
  int bound = f.airy ? 2 * f.d : 4 * f.d + 2;
  for (int v = 0; v < f.n; ++v) {
    if (f.num.degree_in(v) > bound)
      throw std::runtime_error("canonical form: numerator degree exceeds the bound in variable " +
                               std::to_string(v));
    if (f.airy) {
      for (int e = 1; e <= bound; e += 2)
        if (!f.num.coeff_of(v, static_cast<unsigned>(e)).is_zero())
          throw std::runtime_error("canonical form: odd exponent in variable " + std::to_string(v));
    } else {
      if (!(f.num.reverse_var(v, static_cast<unsigned>(bound)) == f.num))
        throw std::runtime_error("canonical form: antisymmetry under the involution fails in variable " +
                                 std::to_string(v));
      for (int alpha : {1, -1})
        if (!f.num.contract_var(v, residue_weights(alpha, f.p, bound)).is_zero())
          throw std::runtime_error("canonical form: nonzero residue at a branch point in variable " +
                                   std::to_string(v));
    }
  }
  for (int v = 0; v + 1 < f.n; ++v) {
    std::array<int, kMaxVars> swap{};
    for (int i = 0; i < kMaxVars; ++i) swap[i] = i;
    swap[v] = v + 1;
    swap[v + 1] = v;
    if (!(f.num.rename_vars(swap) == f.num))
      throw std::runtime_error("canonical form: permutation symmetry fails between variables " +
                               std::to_string(v) + " and " + std::to_string(v + 1));
  }
}

StableForm pack_form(const Frac& total, int g, int n, bool airy) {
  int d = 3 * g - 3 + n;
  int p = 2 * d + 2;
  MultiPoly num = total.num;
  MultiPoly one = MultiPoly::constant(Rat(1));
  for (int v = 0; v < n; ++v) {
    if (airy) {
      if (total.one_minus[v] || total.one_plus[v])
        throw std::runtime_error("canonical form: unexpected pole away from the branch point in variable " +
                                 std::to_string(v));
      int e = total.bare[v];
      if (e > p)
        throw std::runtime_error("canonical form: pole order exceeds the bound in variable " +
                                 std::to_string(v));
      if (e < p) num = num * MultiPoly::variable(v, static_cast<unsigned>(p - e));
    } else {
      if (total.bare[v])
        throw std::runtime_error("canonical form: unexpected pole at z=0 in variable " + std::to_string(v));
      int em = total.one_minus[v];
      int ep = total.one_plus[v];
      if (em > p || ep > p)
        throw std::runtime_error("canonical form: pole order exceeds the bound in variable " +
                                 std::to_string(v));
      MultiPoly zv = MultiPoly::variable(v);
      if (em < p) num = num * (one - zv).pow(static_cast<unsigned>(p - em));
      if (ep < p) num = num * (one + zv).pow(static_cast<unsigned>(p - ep));
    }
  }
  StableForm f;
  f.g = g;
  f.n = n;
  f.d = d;
  f.p = p;
  f.airy = airy;
  f.num = std::move(num);
  assert_canonical(f);
  return f;
}

Frac accumulate_residue(const Series<Frac>& K, const std::vector<Term>& terms, int alpha, bool airy) {
  Frac total;
  for (const Term& t : terms) {
    Series<Frac> B;
    if (t.fs.size() == 1) {
      B = factor_series(t.fs[0], alpha, 0, airy);
    } else {
      Series<Frac> s1 = factor_series(t.fs[0], alpha, -t.fs[1].val, airy);
      Series<Frac> s2 = factor_series(t.fs[1], alpha, -t.fs[0].val, airy);
      B = series_mul(s1, s2, t.val, 0);
    }
    total = total + series_conv_coeff<Frac, Frac, Frac>(K, B, -1);
  }
  return total;
}

StableForm run_recursion(int g, int n, bool airy, const SubFn& sub, const CurveSpec* spec) {
  std::vector<Term> terms = enumerate_terms(g, n, sub);
  int vmin = 0;
  for (const Term& t : terms) vmin = std::min(vmin, t.val);
  int KH = -1 - vmin;
  Frac total;
  if (airy) {
    Series<Frac> K = airy_kernel_series(KH);
    total = accumulate_residue(K, terms, 0, true);
  } else {
    // A truncation of y at depth N perturbs the inverted kernel denominator
    // from order N-2 on, so the window [-2, KH-1] needs depth KH+2.
    Kernel kern = kernel(*spec, KH + 2);
    for (int alpha : {1, -1}) {
      Series<Frac> K = two_branch_kernel_series(kern, alpha, KH);
      total = total + accumulate_residue(K, terms, alpha, false);
    }
  }
  return pack_form(total, g, n, airy);
}

void check_stable_args(int g, int n) {
  if (g < 0 || n < 1) throw std::invalid_argument("stable invariant: g >= 0 and n >= 1 required");
  if (2 * g - 2 + n <= 0)
    throw std::invalid_argument("stable invariant: 2g - 2 + n > 0 required");
  if (n > kMaxVars)
    throw std::invalid_argument("stable invariant: n exceeds the supported variable count");
}

std::map<std::pair<int, int>, StableForm> g_airy_memo;
std::mutex g_airy_mu;

const StableForm& airy_stable(int g, int n) {
  check_stable_args(g, n);
  {
    std::lock_guard<std::mutex> lk(g_airy_mu);
    auto it = g_airy_memo.find({g, n});
    if (it != g_airy_memo.end()) return it->second;
  }
  StableForm f = run_recursion(g, n, true, [](int gg, int nn) -> const StableForm& {
    return airy_stable(gg, nn);
  }, nullptr);
  std::lock_guard<std::mutex> lk(g_airy_mu);
  return g_airy_memo.emplace(std::make_pair(g, n), std::move(f)).first->second;
}

}  // namespace

MultiDifferential omega_unstable(const CurveSpec& spec, int g, int n) {
  if (g == 0 && n == 1) {
    CurveDiag diag = validate_curve(spec);
    if (!diag.ok) {
      std::string msg = "omega_unstable: invalid curve";
      for (const auto& e : diag.errors) msg += "; " + e;
      throw std::invalid_argument(msg);
    }
    RationalFunction ybar =
        spec.y.is_rational ? spec.y.y : partial_sum_y(spec.y, spec.y.jet_depth());
    MultiPoly z = MultiPoly::variable(0);
    MultiPoly one = MultiPoly::constant(Rat(1));
    RationalFunction xp = RationalFunction::make((z * z - one).scaled(spec.b), z * z);
    return {1, ybar * xp};
  }
  if (g == 0 && n == 2) {
    MultiPoly w = MultiPoly::variable(0);
    MultiPoly z = MultiPoly::variable(1);
    return {2, RationalFunction::make(MultiPoly::constant(Rat(1)), (w - z) * (w - z))};
  }
  throw std::invalid_argument("omega_unstable: only (0,1) and (0,2) are unstable");
}

RationalFunction stable_to_rational(const StableForm& f) {
  if (f.num.is_zero()) return RationalFunction();
  MultiPoly num = f.num;
  MultiPoly den = MultiPoly::constant(Rat(1));
  MultiPoly one = MultiPoly::constant(Rat(1));
  int neg = 0;
  for (int v = 0; v < f.n; ++v) {
    MultiPoly zv = MultiPoly::variable(v);
    if (f.airy) {
      int k = 0;
      while (k < f.p && num.coeff_of(v, 0).is_zero()) {
        num = num.div_linear(v, 0);
        ++k;
      }
      if (k < f.p) den = den * MultiPoly::variable(v, static_cast<unsigned>(f.p - k));
    } else {
      int km = 0;
      while (km < f.p && num.eval_var(v, Rat(1)).is_zero()) {
        num = num.div_linear(v, 1);
        ++km;
      }
      int kp = 0;
      while (kp < f.p && num.eval_var(v, Rat(-1)).is_zero()) {
        num = num.div_linear(v, -1);
        ++kp;
      }
      if (km < f.p) den = den * (one - zv).pow(static_cast<unsigned>(f.p - km));
      if (kp < f.p) den = den * (one + zv).pow(static_cast<unsigned>(f.p - kp));
      neg += f.p - km;
    }
  }
  if (neg & 1) {
    num = -num;
    den = -den;
  }
  RationalFunction out;
  out.num = std::move(num);
  out.den = std::move(den);
  return out;
}

std::string stable_to_json(const StableForm& f) {
  nlohmann::json doc;
  doc["g"] = f.g;
  doc["n"] = f.n;
  doc["d"] = f.d;
  doc["p"] = f.p;
  doc["airy"] = f.airy;
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [m, c] : f.num.terms) {
    nlohmann::json row = nlohmann::json::array();
    for (int v = 0; v < f.n; ++v) row.push_back(mono_exp(m, v));
    row.push_back(rat_str(c));
    terms.push_back(std::move(row));
  }
  doc["num"] = std::move(terms);
  return doc.dump();
}

StableForm stable_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("stable form document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("g") || !doc.contains("n") || !doc.contains("num"))
    throw std::invalid_argument("stable form document: missing required fields");
  StableForm f;
  f.g = doc.at("g").get<int>();
  f.n = doc.at("n").get<int>();
  f.d = doc.value("d", 3 * f.g - 3 + f.n);
  f.p = doc.value("p", 2 * f.d + 2);
  f.airy = doc.value("airy", false);
  if (f.n < 1 || f.n > kMaxVars || f.d != 3 * f.g - 3 + f.n || f.p != 2 * f.d + 2)
    throw std::invalid_argument("stable form document: inconsistent shape data");
  MultiPoly num;
  for (const auto& row : doc.at("num")) {
    if (!row.is_array() || row.size() != static_cast<std::size_t>(f.n + 1))
      throw std::invalid_argument("stable form document: malformed term row");
    Mono m = mono_one();
    for (int v = 0; v < f.n; ++v) {
      unsigned e = row.at(static_cast<std::size_t>(v)).get<unsigned>();
      if (e > 250) throw std::invalid_argument("stable form document: exponent out of range");
      m = mono_mul(m, mono_var(v, e));
    }
    num.terms.emplace_back(m, rat_parse(row.at(static_cast<std::size_t>(f.n)).get<std::string>()));
  }
  num.normalize();
  f.num = std::move(num);
  return f;
}

StableForm canonicalize_stable(const MultiDifferential& w, int g, int n) {
  check_stable_args(g, n);
  if (w.n != n) throw std::invalid_argument("canonicalize_stable: variable count mismatch");
  int d = 3 * g - 3 + n;
  int p = 2 * d + 2;
  MultiPoly num = w.value.num;
  MultiPoly den = w.value.den;
  Frac acc(std::move(num));
  for (int v = 0; v < n; ++v) {
    int em = 0, ep = 0;
    while (em < p + 1 && den.eval_var(v, Rat(1)).is_zero()) {
      den = den.div_linear(v, 1);
      ++em;
    }
    while (ep < p + 1 && den.eval_var(v, Rat(-1)).is_zero()) {
      den = den.div_linear(v, -1);
      ++ep;
    }
    if (em > p || ep > p)
      throw std::runtime_error("canonical form: pole order exceeds the bound in variable " +
                               std::to_string(v));
    acc = acc.over(v, static_cast<unsigned>(em), static_cast<unsigned>(ep), 0);
  }
  if (!den.is_constant())
    throw std::runtime_error("canonical form: pole away from the branch points");
  acc = acc.scaled(Rat(1) / den.constant_term());
  return pack_form(acc, g, n, false);
}

Engine::Engine(CurveSpec spec, std::string cache_dir)
    : spec_(std::move(spec)), cache_dir_(std::move(cache_dir)) {
  CurveDiag diag = validate_curve(spec_);
  if (!diag.ok) {
    std::string msg = "Engine: invalid curve";
    for (const auto& e : diag.errors) msg += "; " + e;
    throw std::invalid_argument(msg);
  }
  fingerprint_ = curve_fingerprint(spec_);
}

const StableForm& Engine::stable(int g, int n) {
  check_stable_args(g, n);
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = memo_.find({g, n});
    if (it != memo_.end()) return it->second;
  }
  StableForm f = load_or_compute(g, n);
  std::lock_guard<std::mutex> lk(mu_);
  return memo_.emplace(std::make_pair(g, n), std::move(f)).first->second;
}

StableForm Engine::load_or_compute(int g, int n) {
  std::string path;
  if (!cache_dir_.empty()) {
    path = cache_dir_ + "/" + fingerprint_ + "-g" + std::to_string(g) + "-n" + std::to_string(n) +
           ".json";
    std::ifstream in(path);
    if (in) {
      std::stringstream buf;
      buf << in.rdbuf();
      try {
        StableForm f = stable_from_json(buf.str());
        if (f.g != g || f.n != n || f.airy)
          throw std::invalid_argument("entry describes a different invariant");
        assert_canonical(f);
        return f;
      } catch (const std::exception& e) {
        std::cerr << "warning: ignoring cache entry " << path << ": " << e.what() << "\n";
      }
    }
  }
  StableForm f = compute_stable(g, n);
  if (!path.empty()) {
    std::string tmp = path + ".tmp";
    std::ofstream out(tmp);
    if (out) {
      out << stable_to_json(f) << "\n";
      out.close();
      if (!out || std::rename(tmp.c_str(), path.c_str()) != 0)
        std::cerr << "warning: could not persist cache entry " << path << "\n";
    } else {
      std::cerr << "warning: could not persist cache entry " << path << "\n";
    }
  }
  return f;
}

StableForm Engine::compute_stable(int g, int n) {
  SubFn sub = [this](int gg, int nn) -> const StableForm& { return stable(gg, nn); };
  return run_recursion(g, n, false, sub, &spec_);
}

MultiDifferential Engine::omega(int g, int n) {
  if (g == 0 && (n == 1 || n == 2)) return omega_unstable(spec_, g, n);
  const StableForm& f = stable(g, n);
  return {n, stable_to_rational(f)};
}

MultiDifferential compute_omega(const CurveSpec& spec, int g, int n) {
  if (g == 0 && (n == 1 || n == 2)) return omega_unstable(spec, g, n);
  Engine e(spec);
  return e.omega(g, n);
}

StableForm compute_omega_airy_form(int g, int n) { return airy_stable(g, n); }

MultiDifferential compute_omega_airy(int g, int n) {
  if (g == 0 && n == 1) {
    // y dx on x = z^2, y = z.
    MultiPoly z = MultiPoly::variable(0);
    return {1, RationalFunction::poly((z * z).scaled(Rat(2)))};
  }
  if (g == 0 && n == 2) {
    MultiPoly w = MultiPoly::variable(0);
    MultiPoly z = MultiPoly::variable(1);
    return {2, RationalFunction::make(MultiPoly::constant(Rat(1)), (w - z) * (w - z))};
  }
  const StableForm& f = airy_stable(g, n);
  return {n, stable_to_rational(f)};
}

namespace {

// w[k] is the coefficient of z^(b-1) in z^k / (1 - z^2)^p.
std::vector<Rat> origin_weights(int p, long b, int maxdeg) {
  std::vector<Rat> w;
  w.reserve(static_cast<std::size_t>(maxdeg) + 1);
  for (int k = 0; k <= maxdeg; ++k) w.push_back(expansion_coefficient(k, p - 1, b));
  return w;
}

// Scalar analogue of stable_single_series for a slot factor whose
// spectators are already contracted away: sum_e poly[e] z^e / (1-z^2)^p,
// or its image under the involution (with jacobian) when hatted.
Series<Rat> sampled_single_series(const std::vector<Rat>& poly, int p, bool hatted, int alpha,
                                  int hi) {
  Series<Rat> pp = series_zero<Rat>(0, hi + p);
  for (std::size_t e = 0; e < poly.size(); ++e) {
    if (poly[e] == 0) continue;
    int m = hatted ? 2 * p - 2 - static_cast<int>(e) : static_cast<int>(e);
    Series<Rat> sh = shifted_power(alpha, m, hi + p);
    for (int k = 0; k <= hi + p; ++k) pp.set(k, pp.at(k) + poly[e] * sh.at(k));
  }
  Series<Rat> sp = one_minus_z2_pow(alpha, -p, hi);
  Series<Rat> out = series_zero<Rat>(-p, hi);
  for (int o = -p; o <= hi; ++o) out.set(o, series_conv_coeff<Rat, Rat, Rat>(pp, sp, o));
  return hatted ? series_neg(out) : out;
}

// Scalar analogue of stable_double_series: both slots of a contracted
// two-slot factor bound to the flowing point and its involution image.
Series<Rat> sampled_double_series(const MultiPoly& q, int p, int alpha, int hi) {
  Series<Rat> pp = series_zero<Rat>(0, hi + 2 * p);
  std::map<int, Rat> by_m;
  for (const auto& [mono, c] : q.terms) {
    int m = static_cast<int>(mono_exp(mono, 0)) + 2 * p - 2 - static_cast<int>(mono_exp(mono, 1));
    by_m[m] += c;
  }
  for (const auto& [m, c] : by_m) {
    if (c == 0) continue;
    Series<Rat> sh = shifted_power(alpha, m, hi + 2 * p);
    for (int k = 0; k <= hi + 2 * p; ++k) pp.set(k, pp.at(k) + c * sh.at(k));
  }
  Series<Rat> sp = one_minus_z2_pow(alpha, -2 * p, hi);
  Series<Rat> out = series_zero<Rat>(-2 * p, hi);
  for (int o = -2 * p; o <= hi; ++o) out.set(o, -series_conv_coeff<Rat, Rat, Rat>(pp, sp, o));
  return out;
}

// Contraction of a two-point factor at its spectator value: the coefficient
// of z_j^(b-1) in 1/(z - z_j)^2 is b z^(-b-1), and in the hatted factor
// -1/(1 - z z_j)^2 it is -b z^(b-1).
Series<Rat> sampled_pair_series(long bj, bool hatted, int alpha, int hi) {
  int m = hatted ? static_cast<int>(bj) - 1 : -static_cast<int>(bj) - 1;
  return series_scale(shifted_power(alpha, m, hi), hatted ? Rat(-bj) : Rat(bj));
}

// Coefficient of z0^(b0-1) in K(z0, z), expanded at z = alpha + t.  The
// order-zero parts of z^-b0 and z^b0 agree at alpha = +-1, so the numerator
// starts at order one and K keeps the simple pole in t.
Series<Rat> tuple_kernel_series(const Series<Rat>& invden, int alpha, int KH, long b0) {
  Series<Rat> neg = shifted_power(alpha, -static_cast<int>(b0), KH + 2);
  Series<Rat> pos = shifted_power(alpha, static_cast<int>(b0), KH + 2);
  Series<Rat> numer = series_zero<Rat>(1, KH + 2);
  for (int k = 1; k <= KH + 2; ++k) numer.set(k, neg.at(k) - pos.at(k));
  Series<Rat> out = series_zero<Rat>(-1, KH);
  for (int k = -1; k <= KH; ++k)
    out.set(k, Rat(kGlobalSign) * series_conv_coeff<Rat, Rat, Rat>(numer, invden, k));
  return out;
}

}  // namespace

SampledEvaluator::SampledEvaluator(Engine& engine) : eng_(engine) {}

const std::vector<Rat>& SampledEvaluator::single_poly(const StableForm& f,
                                                      const std::vector<long>& rest) {
  Key key{f.g, f.n, rest};
  auto it = single_.find(key);
  if (it != single_.end()) return it->second;
  MultiPoly acc = f.num;
  for (std::size_t i = 0; i < rest.size(); ++i) {
    int var = 1 + static_cast<int>(i);
    int deg = acc.degree_in(var);
    if (deg < 0) break;
    acc = acc.contract_var(var, origin_weights(f.p, rest[i], deg));
  }
  return single_.emplace(std::move(key), acc.dense(0)).first->second;
}

const MultiPoly& SampledEvaluator::double_poly(const StableForm& f, const std::vector<long>& rest) {
  Key key{f.g, f.n, rest};
  auto it = double_.find(key);
  if (it != double_.end()) return it->second;
  MultiPoly acc = f.num;
  for (std::size_t i = 0; i < rest.size(); ++i) {
    int var = 2 + static_cast<int>(i);
    int deg = acc.degree_in(var);
    if (deg < 0) break;
    acc = acc.contract_var(var, origin_weights(f.p, rest[i], deg));
  }
  return double_.emplace(std::move(key), std::move(acc)).first->second;
}

const Series<Rat>& SampledEvaluator::invden(int alpha, int hi) {
  if (hi > invden_hi_) {
    invden_hi_ = hi;
    invden_.clear();
  }
  auto it = invden_.find(alpha);
  if (it != invden_.end()) return it->second;
  // Depth KH+2 keeps a truncated y exact on the window, as in the
  // materialized route.
  Kernel kern = kernel(eng_.curve(), invden_hi_ + 2);
  return invden_.emplace(alpha, kernel_invden(kern, alpha, invden_hi_)).first->second;
}

Rat SampledEvaluator::n_value(int g, int n, const std::vector<long>& b) {
  check_stable_args(g, n);
  if (static_cast<int>(b.size()) != n)
    throw std::invalid_argument("sampled value: expected " + std::to_string(n) + " entries");
  for (long bi : b) {
    if (bi < 1) throw std::invalid_argument("sampled value: entries must be positive");
  }
  std::lock_guard<std::mutex> lock(mu_);
  // The value depends only on the multiset of entries: the form is symmetric
  // within each parity block and independent of which slots are odd.
  std::vector<long> sorted_b = b;
  std::sort(sorted_b.begin(), sorted_b.end());
  const Key memo_key{g, n, sorted_b};
  if (auto hit = values_.find(memo_key); hit != values_.end()) return hit->second;
  SubFn sub = [this](int gg, int nn) -> const StableForm& { return eng_.stable(gg, nn); };
  std::vector<Term> terms = enumerate_terms(g, n, sub);
  int vmin = 0;
  for (const Term& t : terms) vmin = std::min(vmin, t.val);
  int KH = -1 - vmin;
  auto factor_scalar = [&](const Factor& f, int alpha, int hi) -> Series<Rat> {
    switch (f.kind) {
      case Factor::Kind::kStableZ:
      case Factor::Kind::kStableZhat: {
        std::vector<long> rest;
        rest.reserve(f.spect.size());
        for (int idx : f.spect) rest.push_back(b[static_cast<std::size_t>(idx)]);
        std::sort(rest.begin(), rest.end());
        const std::vector<Rat>& poly = single_poly(*f.form, rest);
        return sampled_single_series(poly, f.form->p, f.kind == Factor::Kind::kStableZhat, alpha,
                                     hi);
      }
      case Factor::Kind::kStableZZ: {
        std::vector<long> rest;
        rest.reserve(f.spect.size());
        for (int idx : f.spect) rest.push_back(b[static_cast<std::size_t>(idx)]);
        std::sort(rest.begin(), rest.end());
        return sampled_double_series(double_poly(*f.form, rest), f.form->p, alpha, hi);
      }
      case Factor::Kind::kPairZ:
        return sampled_pair_series(b[static_cast<std::size_t>(f.j)], false, alpha, hi);
      case Factor::Kind::kPairZhat:
        return sampled_pair_series(b[static_cast<std::size_t>(f.j)], true, alpha, hi);
      case Factor::Kind::kPairZZ:
        return series_scale(one_minus_z2_pow(alpha, -2, hi), Rat(-1));
    }
    throw std::logic_error("sampled value: unknown factor kind");
  };
  Rat total(0);
  for (int alpha : {1, -1}) {
    Series<Rat> K = tuple_kernel_series(invden(alpha, KH), alpha, KH, b[0]);
    for (const Term& t : terms) {
      Series<Rat> B;
      if (t.fs.size() == 1) {
        B = factor_scalar(t.fs[0], alpha, 0);
      } else {
        Series<Rat> s1 = factor_scalar(t.fs[0], alpha, -t.fs[1].val);
        Series<Rat> s2 = factor_scalar(t.fs[1], alpha, -t.fs[0].val);
        B = series_mul(s1, s2, t.val, 0);
      }
      total += series_conv_coeff<Rat, Rat, Rat>(K, B, -1);
    }
  }
  Rat divisor(1);
  for (long bi : b) divisor *= Rat(bi);
  Rat result = total / divisor;
  values_.emplace(memo_key, result);
  return result;
}

}  // namespace eo
