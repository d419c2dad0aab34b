#include "eo/quasipoly.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace eo {

namespace {

// Expansion weights for one variable of a canonical form: w[k] is the
// coefficient of z^(b-1) in z^k / (1 - z^2)^p.
std::vector<Rat> lattice_weights(int p, long b, int maxdeg) {
  std::vector<Rat> w;
  w.reserve(static_cast<std::size_t>(maxdeg) + 1);
  for (int k = 0; k <= maxdeg; ++k) w.push_back(expansion_coefficient(k, p - 1, b));
  return w;
}

// All exponent vectors of length n with total degree at most d, in
// lexicographic order.
void lower_set_rec(int n, int d, std::vector<unsigned>& cur, std::vector<std::vector<unsigned>>& out) {
  if (static_cast<int>(cur.size()) == n) {
    out.push_back(cur);
    return;
  }
  for (int e = 0; e <= d; ++e) {
    cur.push_back(static_cast<unsigned>(e));
    lower_set_rec(n, d - e, cur, out);
    cur.pop_back();
  }
}

std::vector<std::vector<unsigned>> lower_set(int n, int d) {
  std::vector<std::vector<unsigned>> out;
  std::vector<unsigned> cur;
  lower_set_rec(n, d, cur, out);
  return out;
}

// In-place Gaussian elimination; returns false when the matrix is singular.
bool solve_linear(std::vector<std::vector<Rat>>& a, std::vector<Rat>& rhs, std::vector<Rat>& out) {
  const std::size_t m = a.size();
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot = col;
    while (pivot < m && a[pivot][col] == 0) ++pivot;
    if (pivot == m) return false;
    std::swap(a[pivot], a[col]);
    std::swap(rhs[pivot], rhs[col]);
    for (std::size_t r = col + 1; r < m; ++r) {
      if (a[r][col] == 0) continue;
      Rat f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < m; ++c) a[r][c] -= f * a[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  out.assign(m, Rat(0));
  for (std::size_t i = m; i-- > 0;) {
    Rat acc = rhs[i];
    for (std::size_t c = i + 1; c < m; ++c) acc -= a[i][c] * out[c];
    out[i] = acc / a[i][i];
  }
  return true;
}

Rat eval_monomial(const std::vector<unsigned>& exps, const std::vector<Rat>& u) {
  Rat acc(1);
  for (std::size_t i = 0; i < exps.size(); ++i) acc *= rat_pow(u[i], exps[i]);
  return acc;
}

// Node b-values for parity class k: the first k slots are odd, the rest
// even, and each slot steps by `stride` along its beta index.
std::vector<long> class_node(const std::vector<unsigned>& beta, int k, int stride) {
  std::vector<long> b(beta.size());
  for (std::size_t i = 0; i < beta.size(); ++i) {
    long base = static_cast<int>(i) < k ? 1 : 2;
    b[i] = base + static_cast<long>(stride) * beta[i];
  }
  return b;
}

using ValueFn = std::function<Rat(const std::vector<long>&)>;

bool fit_class(const ValueFn& value, int n, int d, int k, int stride, MultiPoly& out) {
  const auto betas = lower_set(n, d);
  const std::size_t m = betas.size();
  std::vector<std::vector<Rat>> a(m, std::vector<Rat>(m));
  std::vector<Rat> rhs(m);
  for (std::size_t r = 0; r < m; ++r) {
    const std::vector<long> b = class_node(betas[r], k, stride);
    std::vector<Rat> u(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) u[i] = Rat(b[i]) * Rat(b[i]);
    for (std::size_t c = 0; c < m; ++c) a[r][c] = eval_monomial(betas[c], u);
    rhs[r] = value(b);
  }
  std::vector<Rat> x;
  if (!solve_linear(a, rhs, x)) return false;
  MultiPoly poly;
  for (std::size_t c = 0; c < m; ++c) {
    if (x[c] == 0) continue;
    Mono mono = mono_one();
    for (std::size_t i = 0; i < betas[c].size(); ++i) {
      if (betas[c][i] > 0) mono = mono_mul(mono, mono_var(static_cast<int>(i), betas[c][i]));
    }
    poly.terms.emplace_back(mono, x[c]);
  }
  poly.normalize();
  out = std::move(poly);
  return true;
}

struct Lexer {
  std::string text;
  std::size_t pos = 0;

  void skip() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  char peek() {
    skip();
    return pos < text.size() ? text[pos] : '\0';
  }
  char take() {
    char c = peek();
    if (pos < text.size()) ++pos;
    return c;
  }
};

MultiPoly parse_sum(Lexer& lx, const std::map<std::string, Rat>& params, int nvars);

MultiPoly parse_primary(Lexer& lx, const std::map<std::string, Rat>& params, int nvars) {
  char c = lx.peek();
  if (c == '(') {
    lx.take();
    MultiPoly inner = parse_sum(lx, params, nvars);
    if (lx.take() != ')') throw std::invalid_argument("closed form: missing ')'");
    return inner;
  }
  if (std::isdigit(static_cast<unsigned char>(c))) {
    std::string digits;
    while (std::isdigit(static_cast<unsigned char>(lx.peek()))) digits.push_back(lx.take());
    return MultiPoly::constant(rat_parse(digits));
  }
  if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
    std::string name;
    while (std::isalnum(static_cast<unsigned char>(lx.peek())) || lx.peek() == '_')
      name.push_back(lx.take());
    if (name == "u" && nvars == 1) return MultiPoly::variable(0);
    if (name.size() >= 2 && name[0] == 'u' &&
        name.find_first_not_of("0123456789", 1) == std::string::npos) {
      long idx = std::strtol(name.c_str() + 1, nullptr, 10);
      if (idx >= 1 && idx <= nvars) return MultiPoly::variable(static_cast<int>(idx - 1));
      throw std::invalid_argument("closed form: variable " + name + " out of range");
    }
    auto it = params.find(name);
    if (it == params.end()) throw std::invalid_argument("closed form: unknown symbol '" + name + "'");
    return MultiPoly::constant(it->second);
  }
  throw std::invalid_argument("closed form: unexpected character");
}

MultiPoly parse_power(Lexer& lx, const std::map<std::string, Rat>& params, int nvars) {
  MultiPoly base = parse_primary(lx, params, nvars);
  if (lx.peek() != '^') return base;
  lx.take();
  std::string digits;
  while (std::isdigit(static_cast<unsigned char>(lx.peek()))) digits.push_back(lx.take());
  if (digits.empty()) throw std::invalid_argument("closed form: exponent must be a nonnegative integer");
  long e = std::strtol(digits.c_str(), nullptr, 10);
  if (e > 60) throw std::invalid_argument("closed form: exponent too large");
  return base.pow(static_cast<unsigned>(e));
}

MultiPoly parse_factor(Lexer& lx, const std::map<std::string, Rat>& params, int nvars) {
  char c = lx.peek();
  if (c == '-') {
    lx.take();
    return -parse_factor(lx, params, nvars);
  }
  if (c == '+') {
    lx.take();
    return parse_factor(lx, params, nvars);
  }
  return parse_power(lx, params, nvars);
}

MultiPoly parse_product(Lexer& lx, const std::map<std::string, Rat>& params, int nvars) {
  MultiPoly acc = parse_factor(lx, params, nvars);
  while (true) {
    char c = lx.peek();
    if (c == '*') {
      lx.take();
      acc = acc * parse_factor(lx, params, nvars);
    } else if (c == '/') {
      lx.take();
      MultiPoly rhs = parse_factor(lx, params, nvars);
      if (!rhs.is_constant() || rhs.is_zero())
        throw std::invalid_argument("closed form: divisor must be a nonzero constant");
      acc = acc.scaled(1 / rhs.constant_term());
    } else {
      break;
    }
  }
  return acc;
}

MultiPoly parse_sum(Lexer& lx, const std::map<std::string, Rat>& params, int nvars) {
  MultiPoly acc = parse_product(lx, params, nvars);
  while (true) {
    char c = lx.peek();
    if (c == '+') {
      lx.take();
      acc += parse_product(lx, params, nvars);
    } else if (c == '-') {
      lx.take();
      acc -= parse_product(lx, params, nvars);
    } else {
      break;
    }
  }
  return acc;
}

}  // namespace

Rat n_lattice_value(const StableForm& f, const std::vector<long>& b) {
  if (f.airy) throw std::invalid_argument("lattice value: form has no expansion at the origin");
  if (static_cast<int>(b.size()) != f.n)
    throw std::invalid_argument("lattice value: expected " + std::to_string(f.n) + " entries");
  for (long bi : b) {
    if (bi < 1) throw std::invalid_argument("lattice value: entries must be positive");
  }
  MultiPoly acc = f.num;
  Rat divisor(1);
  for (int var = f.n - 1; var >= 0; --var) {
    int deg = acc.degree_in(var);
    if (deg < 0) return Rat(0);
    acc = acc.contract_var(var, lattice_weights(f.p, b[static_cast<std::size_t>(var)], deg));
    divisor *= Rat(b[static_cast<std::size_t>(var)]);
  }
  return acc.constant_term() / divisor;
}

QuasiPolynomial extract_quasi(const StableForm& f, const std::string& fingerprint) {
  if (f.airy) throw std::invalid_argument("quasi-polynomial: form has no expansion at the origin");
  return extract_quasi_from([&f](const std::vector<long>& b) { return n_lattice_value(f, b); },
                            f.g, f.n, fingerprint, 20);
}

QuasiPolynomial extract_quasi_from(const std::function<Rat(const std::vector<long>&)>& value,
                                   int g, int n, const std::string& fingerprint,
                                   int heldout_per_class) {
  if (g < 0 || n < 1 || n > kMaxVars || 2 * g - 2 + n <= 0)
    throw std::invalid_argument("quasi-polynomial: unstable or out-of-range (g, n)");
  QuasiPolynomial qp;
  qp.g = g;
  qp.n = n;
  qp.d = 3 * g - 3 + n;
  qp.fingerprint = fingerprint;
  for (int k = 0; k <= n; ++k) {
    MultiPoly rep;
    // A singular collocation matrix is retried once on the wider grid
    // before giving up.
    if (!fit_class(value, n, qp.d, k, 2, rep) && !fit_class(value, n, qp.d, k, 4, rep))
      throw std::runtime_error("quasi-polynomial: singular collocation grid in parity class " +
                               std::to_string(k));
    for (int j = 0; j < heldout_per_class; ++j) {
      std::vector<long> b(static_cast<std::size_t>(n));
      std::vector<Rat> u(b.size());
      for (int i = 0; i < n; ++i) {
        long base = i < k ? 1 : 2;
        b[static_cast<std::size_t>(i)] = base + 2 * (qp.d + 1 + ((j + 3 * i) % 17));
        u[static_cast<std::size_t>(i)] = Rat(b[static_cast<std::size_t>(i)]) * Rat(b[static_cast<std::size_t>(i)]);
      }
      if (rep.eval(u) != value(b))
        throw std::runtime_error("quasi-polynomial: held-out node mismatch in parity class " +
                                 std::to_string(k));
    }
    qp.classes[k] = std::move(rep);
  }
  return qp;
}

Rat evaluate_quasi(const QuasiPolynomial& qp, const std::vector<long>& b) {
  if (static_cast<int>(b.size()) != qp.n)
    throw std::invalid_argument("quasi-polynomial: expected " + std::to_string(qp.n) + " entries");
  std::vector<Rat> odd, even;
  for (long bi : b) {
    long a = bi < 0 ? -bi : bi;
    (a % 2 == 1 ? odd : even).push_back(Rat(a) * Rat(a));
  }
  const int k = static_cast<int>(odd.size());
  auto it = qp.classes.find(k);
  if (it == qp.classes.end())
    throw std::invalid_argument("quasi-polynomial: no representative for parity class " +
                                std::to_string(k));
  std::vector<Rat> u = std::move(odd);
  u.insert(u.end(), even.begin(), even.end());
  return it->second.eval(u);
}

std::string quasi_to_json(const QuasiPolynomial& qp) {
  nlohmann::json doc;
  doc["g"] = qp.g;
  doc["n"] = qp.n;
  doc["d"] = qp.d;
  doc["fingerprint"] = qp.fingerprint;
  nlohmann::json classes = nlohmann::json::object();
  for (const auto& [k, poly] : qp.classes) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& [mono, coef] : poly.terms) {
      nlohmann::json exps = nlohmann::json::array();
      for (int i = 0; i < qp.n; ++i) exps.push_back(mono_exp(mono, i));
      rows.push_back({{"exps", exps}, {"coef", rat_str(coef)}});
    }
    classes[std::to_string(k)] = rows;
  }
  doc["classes"] = classes;
  return doc.dump(2) + "\n";
}

QuasiPolynomial quasi_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("quasi-polynomial document: ") + e.what());
  }
  try {
    QuasiPolynomial qp;
    qp.g = doc.at("g").get<int>();
    qp.n = doc.at("n").get<int>();
    qp.d = doc.at("d").get<int>();
    qp.fingerprint = doc.value("fingerprint", std::string());
    if (qp.n < 1 || qp.n > kMaxVars || qp.d < 0)
      throw std::invalid_argument("quasi-polynomial document: bad dimensions");
    for (const auto& [key, rows] : doc.at("classes").items()) {
      int k = std::stoi(key);
      if (k < 0 || k > qp.n) throw std::invalid_argument("quasi-polynomial document: bad class key");
      MultiPoly poly;
      for (const auto& row : rows) {
        const auto& exps = row.at("exps");
        if (static_cast<int>(exps.size()) != qp.n)
          throw std::invalid_argument("quasi-polynomial document: bad exponent row");
        Mono mono = mono_one();
        for (int i = 0; i < qp.n; ++i) {
          unsigned e = exps.at(static_cast<std::size_t>(i)).get<unsigned>();
          if (e > 250) throw std::invalid_argument("quasi-polynomial document: exponent too large");
          if (e > 0) mono = mono_mul(mono, mono_var(i, e));
        }
        poly.terms.emplace_back(mono, rat_parse(row.at("coef").get<std::string>()));
      }
      poly.normalize();
      qp.classes[k] = std::move(poly);
    }
    return qp;
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("quasi-polynomial document: ") + e.what());
  }
}

MultiPoly parse_expression(const std::string& text, const std::map<std::string, Rat>& params,
                           int nvars) {
  if (nvars < 0 || nvars > kMaxVars) throw std::invalid_argument("closed form: bad variable count");
  Lexer lx{text};
  MultiPoly value = parse_sum(lx, params, nvars);
  if (lx.peek() != '\0') throw std::invalid_argument("closed form: trailing input");
  return value;
}

std::vector<ClassComparison> compare_closed_form(const QuasiPolynomial& qp,
                                                 const std::map<int, std::string>& closed,
                                                 const std::map<std::string, Rat>& params) {
  std::vector<ClassComparison> out;
  for (int k = 0; k <= qp.n; ++k) {
    auto have = qp.classes.find(k);
    MultiPoly actual = have == qp.classes.end() ? MultiPoly::zero() : have->second;
    auto want = closed.find(k);
    MultiPoly expected =
        want == closed.end() ? MultiPoly::zero() : parse_expression(want->second, params, qp.n);
    ClassComparison cmp;
    cmp.k = k;
    std::map<Mono, std::pair<Rat, Rat>> merged;
    for (const auto& [mono, coef] : expected.terms) merged[mono].first = coef;
    for (const auto& [mono, coef] : actual.terms) merged[mono].second = coef;
    for (const auto& [mono, pair] : merged) {
      if (pair.first == pair.second) continue;
      MonomialDiff diff;
      for (int i = 0; i < qp.n; ++i) diff.exps.push_back(mono_exp(mono, i));
      diff.expected = pair.first;
      diff.actual = pair.second;
      cmp.diffs.push_back(std::move(diff));
    }
    cmp.match = cmp.diffs.empty();
    out.push_back(std::move(cmp));
  }
  return out;
}

}  // namespace eo
