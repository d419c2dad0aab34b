#include "eo/ratfun.hpp"

#include <algorithm>
#include <stdexcept>

namespace eo {

namespace {

// Coefficients of p as a univariate polynomial in `var` over the remaining
// variables, dense from degree 0 upward.
std::vector<MultiPoly> coeffs_in(const MultiPoly& p, int var) {
  int deg = p.degree_in(var);
  std::vector<MultiPoly> out(static_cast<std::size_t>(deg + 1));
  for (int e = 0; e <= deg; ++e) out[static_cast<std::size_t>(e)] = p.coeff_of(var, static_cast<unsigned>(e));
  return out;
}

MultiPoly from_coeffs(const std::vector<MultiPoly>& cs, int var) {
  MultiPoly out;
  for (std::size_t e = 0; e < cs.size(); ++e)
    out += cs[e] * MultiPoly::variable(var, static_cast<unsigned>(e));
  return out;
}

int top_used_var(const MultiPoly& a, const MultiPoly& b) {
  return std::max(a.max_var(), b.max_var());
}

// Pseudo-remainder of a by b in `var`: lc(b)^(da-db+1) * a mod b.
MultiPoly pseudo_rem(MultiPoly a, const MultiPoly& b, int var) {
  int db = b.degree_in(var);
  MultiPoly lcb = b.coeff_of(var, static_cast<unsigned>(db));
  while (!a.is_zero() && a.degree_in(var) >= db) {
    int da = a.degree_in(var);
    MultiPoly lca = a.coeff_of(var, static_cast<unsigned>(da));
    a = a * lcb - b * lca * MultiPoly::variable(var, static_cast<unsigned>(da - db));
  }
  return a;
}

MultiPoly normalize_lead(MultiPoly p) {
  if (p.is_zero()) return p;
  Rat lead = p.terms.front().second;
  return p.scaled(1 / lead);
}

MultiPoly content_in(const MultiPoly& p, int var) {
  MultiPoly c;
  for (const auto& part : coeffs_in(p, var)) {
    if (part.is_zero()) continue;
    c = c.is_zero() ? part : poly_gcd(c, part);
    if (c.is_constant()) break;
  }
  return c.is_zero() ? MultiPoly::constant(Rat(1)) : normalize_lead(c);
}

}  // namespace

MultiPoly poly_gcd(MultiPoly a, MultiPoly b) {
  if (a.is_zero()) return normalize_lead(b);
  if (b.is_zero()) return normalize_lead(a);
  int var = top_used_var(a, b);
  if (var < 0) return MultiPoly::constant(Rat(1));
  if (!a.uses_var(var) || !b.uses_var(var)) {
    // One side is free of the top variable: the gcd divides that side's
    // content with respect to it.
    const MultiPoly& flat = a.uses_var(var) ? b : a;
    const MultiPoly& tall = a.uses_var(var) ? a : b;
    return poly_gcd(flat, content_in(tall, var));
  }
  MultiPoly ca = content_in(a, var), cb = content_in(b, var);
  // Keeping every element of the remainder chain monic bounds coefficient
  // growth; without it the pseudo-remainders square in bit size each step.
  MultiPoly pa = normalize_lead(poly_divexact(a, ca));
  MultiPoly pb = normalize_lead(poly_divexact(b, cb));
  while (!pb.is_zero()) {
    MultiPoly r = pseudo_rem(pa, pb, var);
    pa = std::move(pb);
    if (r.is_zero()) {
      pb = MultiPoly::zero();
    } else {
      pb = normalize_lead(poly_divexact(r, content_in(r, var)));
    }
  }
  MultiPoly prim = poly_divexact(pa, content_in(pa, var));
  return normalize_lead(poly_gcd(ca, cb) * prim);
}

MultiPoly poly_divexact(const MultiPoly& a, const MultiPoly& b) {
  if (b.is_zero()) throw std::invalid_argument("poly_divexact: division by zero");
  if (a.is_zero()) return {};
  if (b.is_constant()) return a.scaled(1 / b.constant_term());
  MultiPoly rem = a, q;
  const Mono lead_m = b.terms.front().first;
  const Rat& lead_c = b.terms.front().second;
  while (!rem.is_zero()) {
    const auto& [rm, rc] = rem.terms.front();
    // Divide leading monomials; fail if not divisible.
    Mono qm = mono_one();
    for (int v = 0; v < kMaxVars; ++v) {
      unsigned ea = mono_exp(rm, v), eb = mono_exp(lead_m, v);
      if (ea < eb) throw std::invalid_argument("poly_divexact: not divisible");
      if (ea > eb) qm = mono_mul(qm, mono_var(v, ea - eb));
    }
    MultiPoly qt = MultiPoly::monomial(qm, rc / lead_c);
    q += qt;
    rem -= qt * b;
  }
  return q;
}

RationalFunction RationalFunction::make(MultiPoly num, MultiPoly den) {
  if (den.is_zero()) throw std::invalid_argument("rational function with zero denominator");
  RationalFunction f;
  if (num.is_zero()) return f;
  MultiPoly g = poly_gcd(num, den);
  if (!g.is_constant()) {
    num = poly_divexact(num, g);
    den = poly_divexact(den, g);
  }
  Rat lead = den.terms.front().second;
  f.num = num.scaled(1 / lead);
  f.den = den.scaled(1 / lead);
  return f;
}

RationalFunction RationalFunction::operator-() const {
  RationalFunction f = *this;
  f.num = -f.num;
  return f;
}

RationalFunction RationalFunction::operator+(const RationalFunction& rhs) const {
  return make(num * rhs.den + rhs.num * den, den * rhs.den);
}

RationalFunction RationalFunction::operator-(const RationalFunction& rhs) const {
  return make(num * rhs.den - rhs.num * den, den * rhs.den);
}

RationalFunction RationalFunction::operator*(const RationalFunction& rhs) const {
  return make(num * rhs.num, den * rhs.den);
}

RationalFunction RationalFunction::operator/(const RationalFunction& rhs) const {
  if (rhs.is_zero()) throw std::invalid_argument("division by zero rational function");
  return make(num * rhs.den, den * rhs.num);
}

RationalFunction RationalFunction::derivative(int var) const {
  return make(num.derivative(var) * den - num * den.derivative(var), den * den);
}

RationalFunction RationalFunction::eval_var(int var, const Rat& value) const {
  MultiPoly d = den.eval_var(var, value);
  if (d.is_zero()) throw std::invalid_argument("eval_var: denominator vanishes");
  return make(num.eval_var(var, value), std::move(d));
}

Rat RationalFunction::eval(const std::vector<Rat>& point) const {
  Rat d = den.eval(point);
  if (d == 0) throw std::invalid_argument("eval: denominator vanishes");
  return num.eval(point) / d;
}

namespace {

// Generic series reciprocal over a field.
Series<RationalFunction> series_rf_inverse(const Series<RationalFunction>& a, int len) {
  Series<RationalFunction> t = a;
  t.trim_front();
  if (t.coeffs.empty() || t.coeffs[0].is_zero())
    throw std::invalid_argument("series inverse: vanishing leading coefficient");
  Series<RationalFunction> out = series_zero<RationalFunction>(-t.lo, -t.lo + len - 1);
  const RationalFunction lead = t.coeffs[0];
  out.coeffs[0] = RationalFunction(Rat(1)) / lead;
  for (int k = 1; k < len; ++k) {
    RationalFunction acc;
    for (int j = 1; j <= k && j < static_cast<int>(t.coeffs.size()); ++j)
      acc = acc + t.coeffs[static_cast<std::size_t>(j)] * out.coeffs[static_cast<std::size_t>(k - j)];
    out.coeffs[static_cast<std::size_t>(k)] = -acc / lead;
  }
  return out;
}

// Taylor coefficients of polynomial p in `var` around the point, as rational
// functions in the remaining variables, orders 0..len-1.
Series<RationalFunction> poly_local_series(const MultiPoly& p, int var, const ExpansionPoint& point,
                                           int len) {
  MultiPoly shifted;
  if (point.at_infinity) {
    // z = 1/t: z^deg p(1/z) read back with t in place of z, then the t-order
    // of each original monomial z^e is deg - e... handled by reversal.
    shifted = p.reverse_var(var, static_cast<unsigned>(std::max(p.degree_in(var), 0)));
  } else {
    MultiPoly sub = MultiPoly::constant(point.value) + MultiPoly::variable(var);
    shifted = p.subst_var(var, sub);
  }
  Series<RationalFunction> out = series_zero<RationalFunction>(0, len - 1);
  for (int e = 0; e < len; ++e)
    out.coeffs[static_cast<std::size_t>(e)] =
        RationalFunction::poly(shifted.coeff_of(var, static_cast<unsigned>(e)));
  return out;
}

}  // namespace

Series<RationalFunction> laurent_expand(const RationalFunction& f, int var,
                                        const ExpansionPoint& point, int window) {
  if (f.is_zero()) return series_zero<RationalFunction>(0, window);
  int extra = window + 1;
  int num_len = f.num.degree_in(var) + 1 + extra;
  int den_len = f.den.degree_in(var) + 1 + extra;
  Series<RationalFunction> ns = poly_local_series(f.num, var, point, num_len);
  Series<RationalFunction> ds = poly_local_series(f.den, var, point, den_len);
  if (point.at_infinity) {
    // poly_local_series returned coefficients of z^deg p(1/z); restore the
    // Laurent offset z^e = t^(-e): p = t^(-deg) * (that series).
    ns.lo = -f.num.degree_in(var);
    ds.lo = -f.den.degree_in(var);
  }
  ns.trim_front();
  if (ds.window_zero()) throw std::invalid_argument("laurent_expand: denominator vanishes identically");
  int vn = ns.window_zero() ? 0 : ns.valuation();
  int vd = ds.valuation();
  int pole = vd - vn;  // pole order when positive
  int lo = -std::max(pole, 0);
  int hi = window + lo;
  // The quotient has valuation vn - vd; a window lying entirely below it is
  // all zeros and needs no inversion.
  if (hi < vn - vd) return series_zero<RationalFunction>(lo, hi);
  Series<RationalFunction> inv = series_rf_inverse(ds, hi - (vn - vd) + 1);
  Series<RationalFunction> out = series_zero<RationalFunction>(lo, hi);
  for (int k = lo; k <= hi; ++k)
    out.set(k, series_conv_coeff<RationalFunction, RationalFunction, RationalFunction>(ns, inv, k));
  return out;
}

RationalFunction residue_at(const RationalFunction& f, int var, const ExpansionPoint& point) {
  // At infinity the pullback f(1/w) d(1/w) already carries the -1/w^2 factor.
  RationalFunction g = point.at_infinity ? involution_pullback(f, var, Involution::Reciprocal) : f;
  const ExpansionPoint at0 = point.at_infinity ? ExpansionPoint::at(Rat(0)) : point;
  // The pole order is at most the local denominator degree, so this window
  // always reaches order -1.
  Series<RationalFunction> s = laurent_expand(g, var, at0, g.den.degree_in(var) + 1);
  if (-1 < s.lo) return RationalFunction();
  return s.at(-1);
}

std::vector<Rat> series_coefficients_at_zero(const RationalFunction& f, int var, int max_order) {
  Series<RationalFunction> s = laurent_expand(f, var, ExpansionPoint::at(Rat(0)), max_order);
  if (s.lo < 0)
    for (int k = s.lo; k < 0; ++k)
      if (!s.at(k).is_zero()) throw std::invalid_argument("series_coefficients_at_zero: pole at 0");
  std::vector<Rat> out;
  out.reserve(static_cast<std::size_t>(max_order) + 1);
  for (int k = 0; k <= max_order; ++k) {
    const RationalFunction& c = s.at(k);
    if (!c.is_zero() && !c.is_poly())
      throw std::invalid_argument("series_coefficients_at_zero: non-constant coefficient");
    out.push_back(c.num.constant_term() / c.den.constant_term());
  }
  return out;
}

RationalFunction involution_pullback(const RationalFunction& f, int var, Involution sigma) {
  if (sigma == Involution::Negation) {
    MultiPoly n = f.num, d = f.den;
    auto flip = [var](MultiPoly p) {
      for (auto& [m, c] : p.terms)
        if (mono_exp(m, var) % 2 == 1) c = -c;
      return p;
    };
    // f(-z) * (-1)
    return RationalFunction::make(-flip(f.num), flip(f.den));
  }
  // f(1/z) * (-1/z^2), cleared of negative powers.
  int dn = std::max(f.num.degree_in(var), 0);
  int dd = std::max(f.den.degree_in(var), 0);
  MultiPoly rn = f.num.reverse_var(var, static_cast<unsigned>(dn));
  MultiPoly rd = f.den.reverse_var(var, static_cast<unsigned>(dd));
  // f(1/z) = z^(dd-dn) rn/rd; multiply by -z^(-2).
  int shift = dd - dn - 2;
  MultiPoly num = -rn, den = rd;
  if (shift >= 0)
    num = num * MultiPoly::variable(var, static_cast<unsigned>(shift));
  else
    den = den * MultiPoly::variable(var, static_cast<unsigned>(-shift));
  return RationalFunction::make(std::move(num), std::move(den));
}

Rat expansion_coefficient(long k, long m, long b) {
  if (((b - k) % 2) == 0) return Rat(0);
  return binomial_general((b - k - 1) / 2 + m, m);
}

}  // namespace eo
