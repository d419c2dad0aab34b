#include "eo/multipoly.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace eo {

namespace {

constexpr std::uint64_t kDegShift = 56;

void check_exp(unsigned exp) {
  if (exp >= 255) throw std::invalid_argument("monomial exponent overflow");
}

}  // namespace

Mono mono_one() { return {}; }

Mono mono_var(int var, unsigned exp) {
  if (var < 0 || var >= kMaxVars) throw std::invalid_argument("variable index");
  check_exp(exp);
  Mono m;
  m.bits = (static_cast<std::uint64_t>(exp) << (8 * var)) |
           (static_cast<std::uint64_t>(exp) << kDegShift);
  return m;
}

unsigned mono_exp(Mono m, int var) {
  return static_cast<unsigned>((m.bits >> (8 * var)) & 0xff);
}

unsigned mono_total_degree(Mono m) {
  return static_cast<unsigned>(m.bits >> kDegShift);
}

Mono mono_mul(Mono a, Mono b) {
  Mono m;
  m.bits = a.bits + b.bits;
  // Per-byte carries are impossible while every exponent stays < 255.
  for (int v = 0; v < kMaxVars; ++v) check_exp(mono_exp(a, v) + mono_exp(b, v));
  check_exp(mono_total_degree(a) + mono_total_degree(b));
  return m;
}

Mono mono_with_exp(Mono m, int var, unsigned exp) {
  check_exp(exp);
  unsigned old = mono_exp(m, var);
  unsigned deg = mono_total_degree(m) - old + exp;
  check_exp(deg);
  Mono out;
  out.bits = m.bits & ~((std::uint64_t{0xff} << (8 * var)) | (std::uint64_t{0xff} << kDegShift));
  out.bits |= static_cast<std::uint64_t>(exp) << (8 * var);
  out.bits |= static_cast<std::uint64_t>(deg) << kDegShift;
  return out;
}

MultiPoly MultiPoly::constant(const Rat& c) {
  MultiPoly p;
  if (c != 0) p.terms.emplace_back(mono_one(), c);
  return p;
}

MultiPoly MultiPoly::variable(int var, unsigned exp) {
  return monomial(mono_var(var, exp), Rat(1));
}

MultiPoly MultiPoly::monomial(Mono m, const Rat& c) {
  MultiPoly p;
  if (c != 0) p.terms.emplace_back(m, c);
  return p;
}

bool MultiPoly::is_constant() const {
  return terms.empty() || (terms.size() == 1 && terms[0].first == mono_one());
}

Rat MultiPoly::constant_term() const { return coeff(mono_one()); }

MultiPoly MultiPoly::operator-() const {
  MultiPoly out = *this;
  for (auto& [m, c] : out.terms) c = -c;
  return out;
}

MultiPoly MultiPoly::operator+(const MultiPoly& rhs) const {
  MultiPoly out;
  out.terms.reserve(terms.size() + rhs.terms.size());
  auto a = terms.begin(), b = rhs.terms.begin();
  while (a != terms.end() && b != rhs.terms.end()) {
    if (a->first == b->first) {
      Rat c = a->second + b->second;
      if (c != 0) out.terms.emplace_back(a->first, c);
      ++a, ++b;
    } else if (b->first < a->first) {
      out.terms.push_back(*a++);
    } else {
      out.terms.push_back(*b++);
    }
  }
  out.terms.insert(out.terms.end(), a, terms.end());
  out.terms.insert(out.terms.end(), b, rhs.terms.end());
  return out;
}

MultiPoly MultiPoly::operator-(const MultiPoly& rhs) const { return *this + (-rhs); }

MultiPoly& MultiPoly::operator+=(const MultiPoly& rhs) {
  *this = *this + rhs;
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& rhs) {
  *this = *this - rhs;
  return *this;
}

MultiPoly MultiPoly::operator*(const MultiPoly& rhs) const {
  if (is_zero() || rhs.is_zero()) return {};
  std::unordered_map<Mono, Rat, MonoHash> acc;
  acc.reserve(terms.size() * rhs.terms.size());
  for (const auto& [ma, ca] : terms)
    for (const auto& [mb, cb] : rhs.terms) acc[mono_mul(ma, mb)] += ca * cb;
  MultiPoly out;
  out.terms.reserve(acc.size());
  for (auto& [m, c] : acc)
    if (c != 0) out.terms.emplace_back(m, std::move(c));
  std::sort(out.terms.begin(), out.terms.end(),
            [](const auto& x, const auto& y) { return y.first < x.first; });
  return out;
}

MultiPoly MultiPoly::scaled(const Rat& c) const {
  if (c == 0) return {};
  MultiPoly out = *this;
  for (auto& [m, v] : out.terms) v *= c;
  return out;
}

MultiPoly MultiPoly::pow(unsigned e) const {
  MultiPoly out = constant(Rat(1));
  MultiPoly base = *this;
  while (e) {
    if (e & 1) out = out * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return out;
}

int MultiPoly::degree_in(int var) const {
  int deg = -1;
  for (const auto& [m, c] : terms) deg = std::max(deg, static_cast<int>(mono_exp(m, var)));
  return deg;
}

int MultiPoly::total_degree() const {
  return terms.empty() ? -1 : static_cast<int>(mono_total_degree(terms.front().first));
}

bool MultiPoly::uses_var(int var) const {
  for (const auto& [m, c] : terms)
    if (mono_exp(m, var) > 0) return true;
  return false;
}

int MultiPoly::max_var() const {
  int out = -1;
  for (int v = kMaxVars - 1; v >= 0; --v)
    if (uses_var(v)) return v;
  return out;
}

Rat MultiPoly::coeff(Mono m) const {
  for (const auto& [mm, c] : terms)
    if (mm == m) return c;
  return Rat(0);
}

MultiPoly MultiPoly::coeff_of(int var, unsigned exp) const {
  MultiPoly out;
  for (const auto& [m, c] : terms)
    if (mono_exp(m, var) == exp) out.terms.emplace_back(mono_with_exp(m, var, 0), c);
  out.normalize();
  return out;
}

Rat MultiPoly::eval(const std::vector<Rat>& point) const {
  Rat out(0);
  for (const auto& [m, c] : terms) {
    Rat t = c;
    for (int v = 0; v < kMaxVars; ++v) {
      unsigned e = mono_exp(m, v);
      if (e == 0) continue;
      if (v >= static_cast<int>(point.size()))
        throw std::invalid_argument("eval: missing variable value");
      t *= rat_pow(point[v], static_cast<long>(e));
    }
    out += t;
  }
  return out;
}

MultiPoly MultiPoly::eval_var(int var, const Rat& value) const {
  MultiPoly out;
  std::unordered_map<Mono, Rat, MonoHash> acc;
  for (const auto& [m, c] : terms) {
    unsigned e = mono_exp(m, var);
    Rat t = e ? c * rat_pow(value, static_cast<long>(e)) : c;
    if (t != 0) acc[mono_with_exp(m, var, 0)] += t;
  }
  for (auto& [m, c] : acc)
    if (c != 0) out.terms.emplace_back(m, std::move(c));
  out.normalize();
  return out;
}

MultiPoly MultiPoly::subst_var(int var, const MultiPoly& value) const {
  int deg = degree_in(var);
  if (deg <= 0 && !uses_var(var)) return *this;
  std::vector<MultiPoly> powers(static_cast<std::size_t>(deg) + 1);
  powers[0] = constant(Rat(1));
  for (int e = 1; e <= deg; ++e) powers[e] = powers[e - 1] * value;
  MultiPoly out;
  for (const auto& [m, c] : terms) {
    unsigned e = mono_exp(m, var);
    out += powers[e] * monomial(mono_with_exp(m, var, 0), c);
  }
  return out;
}

MultiPoly MultiPoly::rename_vars(const std::array<int, kMaxVars>& map) const {
  MultiPoly out;
  for (const auto& [m, c] : terms) {
    Mono nm = mono_one();
    for (int v = 0; v < kMaxVars; ++v) {
      unsigned e = mono_exp(m, v);
      if (e == 0) continue;
      int t = map[v];
      if (t < 0) throw std::invalid_argument("rename_vars: variable not mapped");
      nm = mono_mul(nm, mono_var(t, e));
    }
    out.terms.emplace_back(nm, c);
  }
  out.normalize();
  return out;
}

MultiPoly MultiPoly::contract_var(int var, const std::vector<Rat>& weights) const {
  std::unordered_map<Mono, Rat, MonoHash> acc;
  for (const auto& [m, c] : terms) {
    unsigned e = mono_exp(m, var);
    if (e >= weights.size()) throw std::invalid_argument("contract_var: weight table too short");
    if (weights[e] == 0) continue;
    acc[mono_with_exp(m, var, 0)] += c * weights[e];
  }
  MultiPoly out;
  for (auto& [m, c] : acc)
    if (c != 0) out.terms.emplace_back(m, std::move(c));
  out.normalize();
  return out;
}

MultiPoly MultiPoly::reverse_var(int var, unsigned deg) const {
  MultiPoly out;
  for (const auto& [m, c] : terms) {
    unsigned e = mono_exp(m, var);
    if (e > deg) throw std::invalid_argument("reverse_var: degree bound violated");
    out.terms.emplace_back(mono_with_exp(m, var, deg - e), c);
  }
  out.normalize();
  return out;
}

MultiPoly MultiPoly::derivative(int var) const {
  MultiPoly out;
  for (const auto& [m, c] : terms) {
    unsigned e = mono_exp(m, var);
    if (e == 0) continue;
    out.terms.emplace_back(mono_with_exp(m, var, e - 1), c * Rat(e));
  }
  out.normalize();
  return out;
}

MultiPoly MultiPoly::div_linear(int var, int root_kind) const {
  if (is_zero()) return {};
  if (root_kind == 0) {
    MultiPoly out;
    for (const auto& [m, c] : terms) {
      unsigned e = mono_exp(m, var);
      if (e == 0) throw std::invalid_argument("div_linear: not divisible by variable");
      out.terms.emplace_back(mono_with_exp(m, var, e - 1), c);
    }
    out.normalize();
    return out;
  }
  // Group terms by the monomial with `var` cleared and divide each univariate
  // slice by (var - root) synthetically. (1 - v) = -(v - 1) needs an extra
  // negation; (1 + v) = (v - (-1)) does not.
  Rat root(root_kind);  // (1 - v) has root +1, (1 + v) has root -1
  Rat sign(root_kind == 1 ? -1 : 1);
  std::unordered_map<Mono, std::vector<Rat>, MonoHash> groups;
  for (const auto& [m, c] : terms) {
    unsigned e = mono_exp(m, var);
    auto& vec = groups[mono_with_exp(m, var, 0)];
    if (vec.size() <= e) vec.resize(e + 1, Rat(0));
    vec[e] = c;
  }
  MultiPoly out;
  for (auto& [base, vec] : groups) {
    int deg = static_cast<int>(vec.size()) - 1;
    std::vector<Rat> q(static_cast<std::size_t>(std::max(deg, 1)), Rat(0));
    Rat carry(0);
    for (int e = deg; e >= 1; --e) {
      carry = vec[e] + root * carry;
      q[e - 1] = carry;
    }
    Rat rem = vec[0] + root * carry;
    if (rem != 0) throw std::invalid_argument("div_linear: not divisible");
    for (int e = 0; e < deg; ++e)
      if (q[e] != 0)
        out.terms.emplace_back(mono_with_exp(base, var, static_cast<unsigned>(e)), sign * q[e]);
  }
  out.normalize();
  return out;
}

std::vector<Rat> MultiPoly::dense(int var) const {
  std::vector<Rat> out(static_cast<std::size_t>(std::max(degree_in(var), -1) + 1), Rat(0));
  for (const auto& [m, c] : terms) {
    if (mono_total_degree(m) != mono_exp(m, var))
      throw std::invalid_argument("dense: polynomial is not univariate");
    out[mono_exp(m, var)] = c;
  }
  return out;
}

MultiPoly MultiPoly::from_dense(int var, const std::vector<Rat>& coeffs) {
  MultiPoly out;
  for (std::size_t e = 0; e < coeffs.size(); ++e)
    if (coeffs[e] != 0) out.terms.emplace_back(mono_var(var, static_cast<unsigned>(e)), coeffs[e]);
  out.normalize();
  return out;
}

void MultiPoly::normalize() {
  std::sort(terms.begin(), terms.end(),
            [](const auto& x, const auto& y) { return y.first < x.first; });
  std::vector<std::pair<Mono, Rat>> merged;
  merged.reserve(terms.size());
  for (auto& [m, c] : terms) {
    if (!merged.empty() && merged.back().first == m)
      merged.back().second += c;
    else
      merged.emplace_back(m, std::move(c));
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [](const auto& t) { return t.second == 0; }),
               merged.end());
  terms = std::move(merged);
}

}  // namespace eo
