#pragma once

#include <stdexcept>
#include <vector>

#include "eo/rational.hpp"

namespace eo {

// Truncated Laurent series in one local parameter t. Coefficients live in a
// ring C providing +, -, *, == and a default zero constructor. Orders outside
// [lo, hi()] are unknown, not zero, so arithmetic clamps to the window the
// caller fixes; hi() is inclusive.
template <class C>
struct Series {
  int lo = 0;
  std::vector<C> coeffs;  // coeffs[i] is the coefficient of t^(lo + i)

  int hi() const { return lo + static_cast<int>(coeffs.size()) - 1; }

  const C& at(int order) const {
    static const C kZero{};
    if (order < lo || order > hi()) return kZero;
    return coeffs[static_cast<std::size_t>(order - lo)];
  }

  void set(int order, C value) {
    if (order < lo || order > hi()) throw std::invalid_argument("series order outside window");
    coeffs[static_cast<std::size_t>(order - lo)] = std::move(value);
  }

  // Drops leading stored zeros; keeps at least the window end.
  void trim_front() {
    std::size_t k = 0;
    while (k + 1 < coeffs.size() && coeffs[k] == C{}) ++k;
    lo += static_cast<int>(k);
    coeffs.erase(coeffs.begin(), coeffs.begin() + static_cast<long>(k));
  }

  // Lowest order with a nonzero stored coefficient; throws if all stored
  // coefficients vanish (the valuation is then beyond the window).
  int valuation() const {
    for (std::size_t i = 0; i < coeffs.size(); ++i)
      if (!(coeffs[i] == C{})) return lo + static_cast<int>(i);
    throw std::runtime_error("series valuation beyond truncation window");
  }

  bool window_zero() const {
    for (const auto& c : coeffs)
      if (!(c == C{})) return false;
    return true;
  }
};

template <class C>
Series<C> series_zero(int lo, int hi) {
  Series<C> s;
  s.lo = lo;
  s.coeffs.resize(static_cast<std::size_t>(hi - lo + 1));
  return s;
}

template <class C>
Series<C> series_add(const Series<C>& a, const Series<C>& b) {
  int lo = std::min(a.lo, b.lo);
  int hi = std::max(a.hi(), b.hi());
  Series<C> out = series_zero<C>(lo, hi);
  for (int k = lo; k <= hi; ++k) out.set(k, a.at(k) + b.at(k));
  return out;
}

template <class C>
Series<C> series_neg(const Series<C>& a) {
  Series<C> out = a;
  for (auto& c : out.coeffs) c = C{} - c;
  return out;
}

template <class C, class S>
Series<C> series_scale(const Series<C>& a, const S& factor) {
  Series<C> out = a;
  for (auto& c : out.coeffs) c = c * factor;
  return out;
}

template <class C>
Series<C> series_shift(const Series<C>& a, int by) {
  Series<C> out = a;
  out.lo += by;
  return out;
}

// Product truncated to the window [wlo, whi].
template <class C, class A, class B>
Series<C> series_mul_into(const Series<A>& a, const Series<B>& b, int wlo, int whi) {
  Series<C> out = series_zero<C>(wlo, whi);
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
    if (a.coeffs[i] == A{}) continue;
    int oa = a.lo + static_cast<int>(i);
    for (std::size_t j = 0; j < b.coeffs.size(); ++j) {
      int k = oa + b.lo + static_cast<int>(j);
      if (k < wlo || k > whi) continue;
      if (b.coeffs[j] == B{}) continue;
      out.set(k, out.at(k) + a.coeffs[i] * b.coeffs[j]);
    }
  }
  return out;
}

template <class C>
Series<C> series_mul(const Series<C>& a, const Series<C>& b, int wlo, int whi) {
  return series_mul_into<C, C, C>(a, b, wlo, whi);
}

// Single product coefficient: [t^order](a*b). Both windows must cover the
// contributing range; the caller guarantees that by construction.
template <class C, class A, class B>
C series_conv_coeff(const Series<A>& a, const Series<B>& b, int order) {
  C out{};
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
    if (a.coeffs[i] == A{}) continue;
    int oa = a.lo + static_cast<int>(i);
    int ob = order - oa;
    if (ob < b.lo || ob > b.hi()) continue;
    const B& cb = b.at(ob);
    if (cb == B{}) continue;
    out = out + a.coeffs[i] * cb;
  }
  return out;
}

// Reciprocal of a rational-coefficient series, to `len` computed orders.
inline Series<Rat> series_inverse(const Series<Rat>& a, int len) {
  Series<Rat> t = a;
  t.trim_front();
  if (t.coeffs.empty() || t.coeffs[0] == 0)
    throw std::invalid_argument("series_inverse: vanishing leading coefficient");
  Series<Rat> out = series_zero<Rat>(-t.lo, -t.lo + len - 1);
  Rat lead = t.coeffs[0];
  out.coeffs[0] = 1 / lead;
  for (int k = 1; k < len; ++k) {
    Rat acc(0);
    for (int j = 1; j <= k && j < static_cast<int>(t.coeffs.size()); ++j)
      acc += t.coeffs[static_cast<std::size_t>(j)] * out.coeffs[static_cast<std::size_t>(k - j)];
    out.coeffs[static_cast<std::size_t>(k)] = -acc / lead;
  }
  return out;
}

// a^e for nonnegative e, accurate on [wlo, whi] provided `a` is accurate
// through its stored window; `unit` is the coefficient 1 of C.  Intermediate
// products keep enough relative orders that a nonzero valuation of `a` never
// truncates the result early.
template <class C>
Series<C> series_pow(const Series<C>& a, unsigned e, int wlo, int whi, const C& unit) {
  Series<C> res = series_zero<C>(wlo, whi);
  if (e == 0) {
    res.set(0, unit);
    return res;
  }
  Series<C> t = a;
  t.trim_front();
  if (t.coeffs.empty()) return res;
  long rel = static_cast<long>(whi) - static_cast<long>(e) * t.lo;
  if (rel < 0) return res;
  if (t.hi() > t.lo + rel) t.coeffs.resize(static_cast<std::size_t>(rel) + 1);
  Series<C> acc = t;
  for (unsigned i = 1; i < e; ++i) {
    int nlo = acc.lo + t.lo;
    acc = series_mul_into<C, C, C>(acc, t, nlo, nlo + static_cast<int>(rel));
  }
  for (int o = std::max(wlo, acc.lo); o <= whi; ++o) res.set(o, acc.at(o));
  return res;
}

// a^e for any integer e; negative exponents go through series_inverse, so the
// leading coefficient of `a` must be nonzero.
inline Series<Rat> series_pow_int(const Series<Rat>& a, long e, int wlo, int whi) {
  if (e >= 0) return series_pow(a, static_cast<unsigned>(e), wlo, whi, Rat(1));
  Series<Rat> t = a;
  t.trim_front();
  if (t.coeffs.empty())
    throw std::invalid_argument("series_pow_int: negative power of the zero series");
  long k = -e;
  long rel = static_cast<long>(whi) + k * t.lo;
  if (rel < 0) return series_zero<Rat>(wlo, whi);
  Series<Rat> inv = series_inverse(t, static_cast<int>(rel) + 1);
  return series_pow(inv, static_cast<unsigned>(k), wlo, whi, Rat(1));
}

}  // namespace eo
