#include "eo/identities.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace eo {

namespace {

Rat rat_pow(const Rat& x, long e) {
  if (e < 0) {
    if (x == 0) throw std::invalid_argument("rat_pow: zero base with negative exponent");
    Rat inv = Rat(1) / x;
    return rat_pow(inv, -e);
  }
  Rat acc = 1;
  Rat base = x;
  unsigned long n = static_cast<unsigned long>(e);
  while (n) {
    if (n & 1) acc *= base;
    base *= base;
    n >>= 1;
  }
  return acc;
}

// k!! with the (-1)!! = 1 convention.
Rat double_factorial(long k) {
  if (k <= 0) return 1;
  mpz_class v;
  mpz_2fac_ui(v.get_mpz_t(), static_cast<unsigned long>(k));
  return Rat(v);
}

Rat factorial(long k) {
  mpz_class v;
  mpz_fac_ui(v.get_mpz_t(), static_cast<unsigned long>(k));
  return Rat(v);
}

Rat binomial(long l, long k) {
  if (k < 0 || k > l) return 0;
  mpz_class v;
  mpz_bin_uiui(v.get_mpz_t(), static_cast<unsigned long>(l), static_cast<unsigned long>(k));
  return Rat(v);
}

// Rational literal or constant arithmetic expression ("1/12", "2^16*3").
Rat parse_rat(const std::string& text) {
  MultiPoly p = parse_expression(text, {}, 0);
  return p.eval({});
}

Rat nval(const QuasiPolynomial& qp, const std::vector<long>& b) { return evaluate_quasi(qp, b); }

std::vector<long> with_first(long m, const std::vector<long>& b) {
  std::vector<long> out;
  out.reserve(b.size() + 1);
  out.push_back(m);
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::vector<long> replaced(const std::vector<long>& b, std::size_t j, long k) {
  std::vector<long> out = b;
  out[j] = k;
  return out;
}

// All beta in Z_{>=0}^n with sum d, lexicographic.
void compositions_rec(int n, int d, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == n - 1) {
    cur.push_back(d);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int v = 0; v <= d; ++v) {
    cur.push_back(v);
    compositions_rec(n, d - v, cur, out);
    cur.pop_back();
  }
}

std::vector<std::vector<int>> compositions(int d, int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  compositions_rec(n, d, cur, out);
  return out;
}

CheckRecord make_record(std::string equation, const std::string& curve, const std::string& binding,
                        int g, int n, std::vector<long> tuple, Rat lhs, Rat rhs, bool normative,
                        std::string note = "") {
  CheckRecord r;
  r.equation = std::move(equation);
  r.curve = curve;
  r.binding = binding;
  r.g = g;
  r.n = n;
  r.tuple = std::move(tuple);
  r.pass = (lhs == rhs);
  r.lhs = std::move(lhs);
  r.rhs = std::move(rhs);
  r.normative = normative;
  r.note = std::move(note);
  return r;
}

}  // namespace

DiscreteOp DiscreteOp::unit() { return shift(0); }

DiscreteOp DiscreteOp::shift(int j, const Rat& w) {
  DiscreteOp op;
  if (w != 0) op.terms[j] = w;
  return op;
}

DiscreteOp DiscreteOp::operator+(const DiscreteOp& rhs) const {
  DiscreteOp out = *this;
  for (const auto& [j, w] : rhs.terms) out.terms[j] += w;
  out.trim();
  return out;
}

DiscreteOp DiscreteOp::operator-(const DiscreteOp& rhs) const {
  DiscreteOp out = *this;
  for (const auto& [j, w] : rhs.terms) out.terms[j] -= w;
  out.trim();
  return out;
}

DiscreteOp DiscreteOp::operator*(const DiscreteOp& rhs) const {
  DiscreteOp out;
  for (const auto& [ja, wa] : terms)
    for (const auto& [jb, wb] : rhs.terms) out.terms[ja + jb] += wa * wb;
  out.trim();
  return out;
}

DiscreteOp DiscreteOp::scaled(const Rat& c) const {
  DiscreteOp out;
  if (c == 0) return out;
  for (const auto& [j, w] : terms) out.terms[j] = w * c;
  return out;
}

void DiscreteOp::trim() {
  for (auto it = terms.begin(); it != terms.end();) {
    if (it->second == 0)
      it = terms.erase(it);
    else
      ++it;
  }
}

DiscreteOp y_shift_operator(const CurveSpec& spec, int K) {
  if (K < 0) throw std::invalid_argument("y_shift_operator: negative truncation");
  std::vector<Rat> ak;
  std::vector<Rat> bk;
  if (spec.y.is_rational) {
    YData jets = jets_from_rational(spec.y.y, K);
    ak = jets.ak;
    bk = jets.bk;
  } else {
    if (spec.y.jet_depth() < K)
      throw std::invalid_argument("y_shift_operator: stored jet data shallower than truncation");
    ak = spec.y.ak;
    bk = spec.y.bk;
  }
  DiscreteOp acc;
  DiscreteOp power = DiscreteOp::unit();
  const DiscreteOp base = DiscreteOp::unit() - DiscreteOp::shift(2);
  const DiscreteOp D = DiscreteOp::shift(1);
  for (int k = 0; k <= K; ++k) {
    Rat a = k < static_cast<int>(ak.size()) ? ak[k] : Rat(0);
    Rat b = k < static_cast<int>(bk.size()) ? bk[k] : Rat(0);
    if (a != 0) acc = acc + power.scaled(a);
    if (b != 0) acc = acc + (D * power).scaled(b);
    if (k < K) power = power * base;
  }
  return acc;
}

Rat apply_discrete(const DiscreteOp& op, const std::function<Rat(long)>& f, long base) {
  Rat acc = 0;
  for (const auto& [j, w] : op.terms) acc += w * f(base + j);
  return acc;
}

Rat IntersectionTable::value(int g, std::vector<int> beta) {
  if (g < 0 || beta.empty()) return 0;
  long need = 3L * g - 3 + static_cast<long>(beta.size());
  long sum = 0;
  for (int b : beta) {
    if (b < 0) return 0;
    sum += b;
  }
  if (sum != need) return 0;
  std::sort(beta.begin(), beta.end(), std::greater<int>());
  auto key = std::make_pair(g, beta);
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  Rat v = compute(g, beta);
  memo_.emplace(std::move(key), v);
  return v;
}

Rat IntersectionTable::compute(int g, const std::vector<int>& beta) {
  int n = static_cast<int>(beta.size());
  if (g == 0 && n == 3) return 1;  // <tau_0^3>_0, the only all-zero index
  if (g == 1 && n == 1) return Rat(1, 24);
  // beta is sorted descending and in the correct dimension, so beta[0] >= 1.
  int k = beta[0] - 1;
  std::vector<int> rest(beta.begin() + 1, beta.end());
  Rat acc = 0;
  for (std::size_t j = 0; j < rest.size(); ++j) {
    std::vector<int> merged = rest;
    merged[j] = rest[j] + k;
    acc += double_factorial(2L * k + 2L * rest[j] + 1) / double_factorial(2L * rest[j] - 1) *
           value(g, merged);
  }
  Rat pair_sum = 0;
  int nrest = static_cast<int>(rest.size());
  for (int a = 0; a <= k - 1; ++a) {
    int b = k - 1 - a;
    Rat weight = double_factorial(2L * a + 1) * double_factorial(2L * b + 1);
    Rat inner = 0;
    if (g >= 1) {
      std::vector<int> joined;
      joined.reserve(rest.size() + 2);
      joined.push_back(a);
      joined.push_back(b);
      joined.insert(joined.end(), rest.begin(), rest.end());
      inner += value(g - 1, joined);
    }
    for (unsigned mask = 0; mask < (1u << nrest); ++mask) {
      std::vector<int> left{a};
      std::vector<int> right{b};
      for (int i = 0; i < nrest; ++i) {
        if (mask & (1u << i))
          left.push_back(rest[i]);
        else
          right.push_back(rest[i]);
      }
      for (int g1 = 0; g1 <= g; ++g1) {
        Rat f1 = value(g1, left);
        if (f1 == 0) continue;
        inner += f1 * value(g - g1, right);
      }
    }
    pair_sum += weight * inner;
  }
  acc += pair_sum / Rat(2);
  return acc / double_factorial(2L * k + 3);
}

int IntersectionTable::check_string_consistency() {
  std::vector<std::pair<std::pair<int, std::vector<int>>, Rat>> entries(memo_.begin(),
                                                                        memo_.end());
  int checked = 0;
  for (const auto& [key, val] : entries) {
    int g = key.first;
    const std::vector<int>& beta = key.second;
    int n = static_cast<int>(beta.size());
    if (2 * g - 2 + (n - 1) <= 0) continue;
    auto zero = std::find(beta.begin(), beta.end(), 0);
    if (zero == beta.end()) continue;
    std::vector<int> rest = beta;
    rest.erase(rest.begin() + (zero - beta.begin()));
    Rat rhs = 0;
    for (std::size_t i = 0; i < rest.size(); ++i) {
      if (rest[i] == 0) continue;
      std::vector<int> lowered = rest;
      lowered[i] -= 1;
      rhs += value(g, lowered);
    }
    if (val != rhs) {
      std::ostringstream msg;
      msg << "intersection oracle string equation failed at g=" << g << " beta=(";
      for (std::size_t i = 0; i < beta.size(); ++i) msg << (i ? "," : "") << beta[i];
      msg << "): " << rat_str(val) << " vs " << rat_str(rhs);
      throw std::runtime_error(msg.str());
    }
    ++checked;
  }
  return checked;
}

Rat dvv_intersection(int g, const std::vector<int>& beta) {
  static IntersectionTable table;
  long need = 3L * g - 3 + static_cast<long>(beta.size());
  long sum = 0;
  bool bad = beta.empty() || g < 0;
  for (int b : beta) {
    if (b < 0) bad = true;
    sum += b;
  }
  if (bad || sum != need) {
    std::cerr << "warning: intersection index violates sum beta_i = 3g-3+n; value taken as 0\n";
    return 0;
  }
  return table.value(g, std::vector<int>(beta));
}

int SuiteReport::failures() const {
  int c = 0;
  for (const auto& r : records)
    if (!r.pass) ++c;
  return c;
}

int SuiteReport::normative_failures() const {
  int c = 0;
  for (const auto& r : records)
    if (r.normative && !r.pass) ++c;
  return c;
}

void SuiteReport::sort() {
  std::stable_sort(records.begin(), records.end(), [](const CheckRecord& a, const CheckRecord& b) {
    return std::tie(a.equation, a.curve, a.binding, a.g, a.n, a.tuple) <
           std::tie(b.equation, b.curve, b.binding, b.g, b.n, b.tuple);
  });
}

namespace {

nlohmann::json record_to_json(const CheckRecord& r) {
  nlohmann::json doc;
  doc["equation"] = r.equation;
  doc["curve"] = r.curve;
  doc["binding"] = r.binding;
  doc["g"] = r.g;
  doc["n"] = r.n;
  doc["tuple"] = r.tuple;
  doc["lhs"] = rat_str(r.lhs);
  doc["rhs"] = rat_str(r.rhs);
  doc["pass"] = r.pass;
  doc["normative"] = r.normative;
  if (!r.note.empty()) doc["note"] = r.note;
  return doc;
}

std::string tuple_text(const std::vector<long>& t) {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < t.size(); ++i) out << (i ? "," : "") << t[i];
  out << ")";
  return out.str();
}

}  // namespace

std::string report_to_json(const std::vector<SuiteReport>& reports) {
  nlohmann::json suites = nlohmann::json::array();
  for (const auto& rep : reports) {
    nlohmann::json doc;
    doc["suite"] = rep.suite;
    doc["checked"] = rep.checked();
    doc["failures"] = rep.failures();
    doc["normative_failures"] = rep.normative_failures();
    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : rep.records) records.push_back(record_to_json(r));
    doc["records"] = std::move(records);
    suites.push_back(std::move(doc));
  }
  nlohmann::json root;
  root["suites"] = std::move(suites);
  return root.dump(2);
}

std::string report_to_markdown(const std::vector<SuiteReport>& reports) {
  std::ostringstream out;
  out << "# Identity suite report\n";
  for (const auto& rep : reports) {
    out << "\n## " << rep.suite << "\n\n";
    std::map<std::string, std::pair<int, int>> stats;  // equation -> (checked, failed)
    for (const auto& r : rep.records) {
      auto& s = stats[r.equation];
      ++s.first;
      if (!r.pass) ++s.second;
    }
    out << "| equation | checked | failed |\n|---|---|---|\n";
    for (const auto& [eq, s] : stats) out << "| " << eq << " | " << s.first << " | " << s.second
                                          << " |\n";
    int failures = rep.failures();
    if (failures > 0) {
      out << "\nFailing records";
      constexpr int kListCap = 40;
      if (failures > kListCap) out << " (first " << kListCap << " of " << failures << ")";
      out << ":\n\n";
      int listed = 0;
      for (const auto& r : rep.records) {
        if (r.pass) continue;
        if (listed == kListCap) break;
        out << "- `" << r.equation << "` " << r.curve;
        if (!r.binding.empty()) out << " [" << r.binding << "]";
        out << " (g,n)=(" << r.g << "," << r.n << ") tuple=" << tuple_text(r.tuple)
            << " lhs=" << rat_str(r.lhs) << " rhs=" << rat_str(r.rhs);
        if (!r.normative) out << " (informational)";
        if (!r.note.empty()) out << " -- " << r.note;
        out << "\n";
        ++listed;
      }
    }
  }
  return out.str();
}

CurveInstance make_instance(const std::string& preset,
                            const std::vector<std::pair<std::string, std::string>>& params) {
  CurveInstance inst;
  inst.preset = preset;
  std::ostringstream text;
  bool first = true;
  for (const auto& [name, val] : params) {
    inst.binding.values.emplace(name, parse_rat(val));
    text << (first ? "" : ",") << name << "=" << val;
    first = false;
  }
  inst.binding_text = text.str();
  inst.spec = catalog_instantiate(preset, inst.binding);
  return inst;
}

std::vector<CurveInstance> default_instances() {
  std::vector<CurveInstance> out;
  out.push_back(make_instance("monomial", {{"m", "1"}}));
  out.push_back(make_instance("monomial", {{"m", "2"}}));
  out.push_back(make_instance("monomial", {{"m", "3"}}));
  out.push_back(make_instance("ln", {}));
  out.push_back(make_instance("ln+cz", {{"c", "2"}}));
  out.push_back(make_instance("q-deformed", {{"z0", "2"}}));
  out.push_back(make_instance("discrete-surfaces", {{"u", "2"}}));
  out.push_back(make_instance("quadrangulations", {{"gamma", "1"}, {"t4", "1/12"}}));
  return out;
}

Workspace::Workspace(std::string cache_dir) : cache_dir_(std::move(cache_dir)) {
  if (!cache_dir_.empty()) std::filesystem::create_directories(cache_dir_);
}

Engine& Workspace::engine(const CurveSpec& spec) {
  std::string fp = curve_fingerprint(spec);
  auto it = engines_.find(fp);
  if (it == engines_.end())
    it = engines_.emplace(fp, std::make_unique<Engine>(spec, cache_dir_)).first;
  return *it->second;
}

SampledEvaluator& Workspace::sampler(const CurveSpec& spec) {
  std::string fp = curve_fingerprint(spec);
  auto it = samplers_.find(fp);
  if (it == samplers_.end())
    it = samplers_.emplace(fp, std::make_unique<SampledEvaluator>(engine(spec))).first;
  return *it->second;
}

const QuasiPolynomial& Workspace::quasi(const CurveSpec& spec, int g, int n) {
  std::string fp = curve_fingerprint(spec);
  auto key = std::make_tuple(fp, g, n);
  auto it = quasis_.find(key);
  if (it != quasis_.end()) return it->second;

  std::string path;
  if (!cache_dir_.empty()) {
    path = cache_dir_ + "/" + fp + "-nq-g" + std::to_string(g) + "-n" + std::to_string(n) +
           ".json";
    std::ifstream in(path);
    if (in) {
      std::stringstream buf;
      buf << in.rdbuf();
      try {
        QuasiPolynomial qp = quasi_from_json(buf.str());
        if (qp.g != g || qp.n != n || qp.fingerprint != fp)
          throw std::invalid_argument("entry describes a different quasi-polynomial");
        return quasis_.emplace(std::move(key), std::move(qp)).first->second;
      } catch (const std::exception& e) {
        std::cerr << "warning: ignoring cache entry " << path << ": " << e.what() << "\n";
      }
    }
  }

  QuasiPolynomial qp;
  // (1,4) and (0,6) forms are too large to materialize; their representatives
  // are fit from sampled lattice values with as many held-out nodes as the
  // parity-matched node supply allows.
  bool sampled = (g == 1 && n == 4) || (g == 0 && n == 6);
  if (sampled) {
    SampledEvaluator& ev = sampler(spec);
    int heldout = (g == 1) ? 4 : 3;
    auto value = [&ev, g, n](const std::vector<long>& b) { return ev.n_value(g, n, b); };
    qp = extract_quasi_from(value, g, n, fp, heldout);
  } else {
    qp = extract_quasi(engine(spec).stable(g, n), fp);
  }
  if (!path.empty()) {
    std::string tmp = path + ".tmp";
    std::ofstream out(tmp);
    if (out) {
      out << quasi_to_json(qp) << "\n";
      out.close();
      if (!out || std::rename(tmp.c_str(), path.c_str()) != 0)
        std::cerr << "warning: could not persist cache entry " << path << "\n";
    } else {
      std::cerr << "warning: could not persist cache entry " << path << "\n";
    }
  }
  return quasis_.emplace(std::move(key), std::move(qp)).first->second;
}

std::vector<std::vector<long>> tuple_grid(int n, long max_b) {
  if (n < 1 || max_b < 1) throw std::invalid_argument("tuple_grid: n >= 1 and max_b >= 1");
  std::vector<std::vector<long>> out;
  std::vector<long> cur(n, 1);
  while (true) {
    out.push_back(cur);
    int i = n - 1;
    while (i >= 0 && cur[i] == max_b) --i;
    if (i < 0) break;
    long next = cur[i] + 1;
    for (int j = i; j < n; ++j) cur[j] = next;
  }
  return out;
}

namespace {

// Applies op to f at base with the truncation-bump cross-check: op2 is the
// same operator construction at K+1 and must give the same value.
Rat apply_verified(const DiscreteOp& op, const DiscreteOp& op2, const std::function<Rat(long)>& f,
                   long base) {
  Rat a = apply_discrete(op, f, base);
  Rat b = apply_discrete(op2, f, base);
  if (a != b) throw std::runtime_error("shift operator value changed under truncation bump");
  return a;
}

}  // namespace

Rat symplectic_F(Workspace& ws, const CurveSpec& spec, int g) {
  if (g < 2) throw std::invalid_argument("symplectic_F: g >= 2 required");
  const QuasiPolynomial& qp = ws.quasi(spec, g, 1);
  int K = 2 * qp.d + 2;
  DiscreteOp dil = DiscreteOp::unit() - DiscreteOp::shift(2);
  DiscreteOp op = dil * y_shift_operator(spec, K);
  DiscreteOp op2 = dil * y_shift_operator(spec, K + 1);
  auto f = [&qp](long m) { return nval(qp, {m}); };
  Rat val = apply_verified(op, op2, f, -1);
  return val / Rat(2 - 2 * g);
}

Rat t_extraction(const QuasiPolynomial& qp, const std::vector<long>& l, const Rat& gamma) {
  int n = static_cast<int>(l.size());
  if (n != qp.n) throw std::invalid_argument("t_extraction: index count does not match N");
  long lsum = 0;
  for (long li : l) {
    if (li < 0) throw std::invalid_argument("t_extraction: negative index");
    lsum += li;
  }
  std::vector<long> k(n);
  std::vector<long> lo(n);
  for (int i = 0; i < n; ++i) {
    lo[i] = l[i] / 2 + 1;  // smallest k with 2k - l > 0
    k[i] = lo[i];
  }
  Rat acc = 0;
  for (int i = 0; i < n; ++i)
    if (lo[i] > l[i]) return 0;  // empty range (l_i = 0)
  while (true) {
    std::vector<long> b(n);
    Rat weight = 1;
    for (int i = 0; i < n; ++i) {
      b[i] = 2 * k[i] - l[i];
      weight *= Rat(b[i]) * binomial(l[i], k[i]);
    }
    acc += weight * nval(qp, b);
    int i = n - 1;
    while (i >= 0 && k[i] == l[i]) --i;
    if (i < 0) break;
    ++k[i];
    for (int j = i + 1; j < n; ++j) k[j] = lo[j];
  }
  Rat sign = (n % 2) ? Rat(-1) : Rat(1);
  return sign * rat_pow(gamma, lsum) * acc;
}

SuiteReport tables_suite(Workspace& ws, const std::string& fixtures_dir) {
  SuiteReport rep;
  rep.suite = "tables";
  std::vector<std::string> files;
  for (const auto& entry : std::filesystem::directory_iterator(fixtures_dir))
    if (entry.path().extension() == ".json") files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("tables_suite: cannot open " + file);
    nlohmann::json doc = nlohmann::json::parse(in);
    std::string preset = doc.at("preset").get<std::string>();
    for (const auto& binding_doc : doc.at("bindings")) {
      ParamBinding binding;
      std::ostringstream btext;
      bool first = true;
      for (auto it = binding_doc.begin(); it != binding_doc.end(); ++it) {
        binding.values.emplace(it.key(), parse_rat(it.value().get<std::string>()));
        btext << (first ? "" : ",") << it.key() << "=" << it.value().get<std::string>();
        first = false;
      }
      CurveSpec spec = catalog_instantiate(preset, binding);
      std::map<std::string, Rat> params = binding.values;
      if (doc.contains("derived"))
        for (const auto& pair : doc.at("derived")) {
          std::string name = pair.at(0).get<std::string>();
          MultiPoly val = parse_expression(pair.at(1).get<std::string>(), params, 0);
          params[name] = val.eval({});
        }
      for (const auto& row : doc.at("rows")) {
        int g = row.at("g").get<int>();
        int n = row.at("n").get<int>();
        std::string expr = row.at("expr").get<std::string>();
        const QuasiPolynomial& qp = ws.quasi(spec, g, n);
        for (int k : row.at("k")) {
          auto comps = compare_closed_form(qp, {{k, expr}}, params);
          bool pass = !comps.empty() && comps.front().match;
          std::string note;
          if (!pass && !comps.empty()) {
            std::ostringstream msg;
            msg << "mismatches:";
            int listed = 0;
            for (const auto& diff : comps.front().diffs) {
              if (listed == 3) {
                msg << " ...";
                break;
              }
              msg << " [";
              for (std::size_t i = 0; i < diff.exps.size(); ++i)
                msg << (i ? "," : "") << diff.exps[i];
              msg << "] expected " << rat_str(diff.expected) << " got " << rat_str(diff.actual)
                  << ";";
              ++listed;
            }
            note = msg.str();
          }
          CheckRecord r;
          r.equation = "table";
          r.curve = preset;
          r.binding = btext.str();
          r.g = g;
          r.n = n;
          r.tuple = {k};
          r.lhs = pass ? Rat(0) : Rat(1);
          r.rhs = 0;
          r.pass = pass;
          r.normative = true;
          r.note = note;
          rep.append(std::move(r));
          if (row.contains("printed")) {
            CheckRecord e;
            e.equation = "table-erratum";
            e.curve = preset;
            e.binding = btext.str();
            e.g = g;
            e.n = n;
            e.tuple = {k};
            e.lhs = 0;
            e.rhs = 0;
            e.pass = true;
            e.normative = false;
            e.note = row.value("note", std::string()) + " source text: " +
                     row.at("printed").get<std::string>();
            rep.append(std::move(e));
          }
        }
      }
    }
  }
  rep.sort();
  return rep;
}

namespace {

// sum over j and 1 <= k <= b_j of k N(b | b_j = k), with the summand parity
// restricted to k != b_j (mod 2), k == b_j (mod 2), or unrestricted.
enum class ParityRule { kOpposite, kSame, kAll };

Rat string_sum(const QuasiPolynomial& src, const std::vector<long>& b, ParityRule rule) {
  Rat acc = 0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    for (long k = 1; k <= b[j]; ++k) {
      if (rule == ParityRule::kOpposite && (k % 2) == (b[j] % 2)) continue;
      if (rule == ParityRule::kSame && (k % 2) != (b[j] % 2)) continue;
      acc += Rat(k) * nval(src, replaced(b, j, k));
    }
  }
  return acc;
}

Rat offset_sum(const QuasiPolynomial& src, const std::vector<long>& b) {
  Rat acc = 0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    acc += Rat(1 + b[j]) * nval(src, replaced(b, j, 1 + b[j]));
    acc += Rat(1 - b[j]) * nval(src, replaced(b, j, 1 - b[j]));
  }
  return acc;
}

long tuple_sum(const std::vector<long>& b) {
  long s = 0;
  for (long v : b) s += v;
  return s;
}

// The source pairs (g, n) -> (g, n+1) with 2g - 2 + (n+1) <= 4.
const std::vector<std::pair<int, int>> kStringPairs = {{0, 3}, {0, 4}, {0, 5}, {1, 1},
                                                       {1, 2}, {1, 3}, {2, 1}};

}  // namespace

SuiteReport string_suite(Workspace& ws, const std::vector<CurveInstance>& curves, long max_b) {
  SuiteReport rep;
  rep.suite = "string";
  for (const auto& inst : curves) {
    for (const auto& [g, n] : kStringPairs) {
      const QuasiPolynomial& src = ws.quasi(inst.spec, g, n);
      const QuasiPolynomial& tgt = ws.quasi(inst.spec, g, n + 1);
      // K = (m-degree of the slice) + 2; the slice m N(m, b) has degree
      // 2 d(tgt) + 1 and N(m, b) one less.
      int kn = 2 * tgt.d + 2;
      DiscreteOp y1 = y_shift_operator(inst.spec, kn);
      DiscreteOp y2 = y_shift_operator(inst.spec, kn + 1);
      DiscreteOp y3 = y_shift_operator(inst.spec, kn + 2);
      DiscreteOp D = DiscreteOp::shift(1);
      DiscreteOp one = DiscreteOp::unit();
      DiscreteOp dil = one - DiscreteOp::shift(2);
      DiscreteOp same = one + DiscreteOp::shift(2);
      DiscreteOp op_a = D * y2, op_a2 = D * y3;
      DiscreteOp op_b = same * y2, op_b2 = same * y3;
      DiscreteOp op_c = dil * dil * y2, op_c2 = dil * dil * y3;
      DiscreteOp op_d = dil * y1, op_d2 = dil * y2;
      for (const auto& b : tuple_grid(n, max_b)) {
        auto f_mn = [&tgt, &b](long m) { return Rat(m) * nval(tgt, with_first(m, b)); };
        auto f_n = [&tgt, &b](long m) { return nval(tgt, with_first(m, b)); };
        Rat nb = nval(src, b);
        rep.append(make_record("string-opp-parity", inst.preset, inst.binding_text, g, n, b,
                               apply_verified(op_a, op_a2, f_mn, -1),
                               string_sum(src, b, ParityRule::kOpposite), true));
        rep.append(make_record("string-same-parity", inst.preset, inst.binding_text, g, n, b,
                               apply_verified(op_b, op_b2, f_mn, -1),
                               Rat(2) * string_sum(src, b, ParityRule::kSame) -
                                   Rat(tuple_sum(b)) * nb,
                               true));
        rep.append(make_record("string-offset", inst.preset, inst.binding_text, g, n, b,
                               apply_verified(op_c, op_c2, f_mn, -2), offset_sum(src, b), true));
        rep.append(make_record("dilaton", inst.preset, inst.binding_text, g, n, b,
                               apply_verified(op_d, op_d2, f_n, -1), Rat(2 - 2 * g - n) * nb,
                               true));
      }
    }
  }
  rep.sort();
  return rep;
}

namespace {

const std::vector<std::pair<int, int>> kInterScope = {{0, 3}, {1, 1}, {0, 4}, {1, 2},
                                                     {2, 1}, {1, 3}, {0, 5}, {2, 2}};

}  // namespace

SuiteReport inter_suite(Workspace& ws, const std::vector<CurveInstance>& curves,
                        IntersectionTable& table) {
  SuiteReport rep;
  rep.suite = "inter";
  for (const auto& inst : curves) {
    CurveDiag diag = validate_curve(inst.spec);
    for (const auto& [g, n] : kInterScope) {
      const QuasiPolynomial& qp = ws.quasi(inst.spec, g, n);
      int d = qp.d;
      long chi = 2L - 2 * g - n;
      Rat yp = rat_pow(diag.y_prime_plus, chi);
      Rat ym = rat_pow(diag.y_prime_minus, chi);
      Rat scale = rat_pow(diag.x_second_plus, -(2L * g - 2 + n)) *
                  rat_pow(Rat(2), -(3L * g - 3 + n));
      for (const auto& beta : compositions(d, n)) {
        Rat bfact = 1;
        Mono mono = mono_one();
        for (int i = 0; i < n; ++i) {
          bfact *= factorial(beta[i]);
          mono = mono_mul(mono, mono_var(i, static_cast<unsigned>(beta[i])));
        }
        Rat tau = table.value(g, beta);
        for (int k = 0; k <= n; ++k) {
          Rat expected = (yp + (k % 2 ? Rat(-1) : Rat(1)) * ym) * scale / bfact * tau;
          Rat actual = qp.classes.at(k).coeff(mono);
          std::vector<long> tuple;
          tuple.push_back(k);
          for (int v : beta) tuple.push_back(v);
          rep.append(make_record("coef-intersection", inst.preset, inst.binding_text, g, n,
                                 std::move(tuple), actual, expected, true));
        }
      }
      for (int k = 0; k <= n; ++k) {
        int deg = qp.classes.at(k).total_degree();
        rep.append(make_record("degree-bound", inst.preset, inst.binding_text, g, n, {k},
                               Rat(deg <= d ? 0 : deg), 0, true,
                               "representative degree stays at or below 3g-3+n"));
      }
    }
  }
  rep.sort();
  return rep;
}

namespace {

const std::vector<std::pair<int, int>> kAiryScope = {{0, 3}, {1, 1}, {0, 4}, {1, 2}, {2, 1},
                                                    {1, 3}, {0, 5}, {2, 2}, {3, 1}};

}  // namespace

SuiteReport airy_oracle_suite(IntersectionTable& table) {
  SuiteReport rep;
  rep.suite = "airy-oracle";
  for (const auto& [g, n] : kAiryScope) {
    const StableForm form = compute_omega_airy_form(g, n);
    int d = 3 * g - 3 + n;
    Rat front = rat_pow(Rat(2), 2L - 2 * g - n);
    // Expected numerator: the coefficient of prod z_i^{2(d - beta_i)} is
    // 2^{2-2g-n} prod (2 beta_i + 1)!! <tau_beta>, nothing else.
    std::map<Mono, Rat> expected;
    for (const auto& beta : compositions(d, n)) {
      Mono mono = mono_one();
      Rat weight = front;
      for (int i = 0; i < n; ++i) {
        mono = mono_mul(mono, mono_var(i, static_cast<unsigned>(2 * (d - beta[i]))));
        weight *= double_factorial(2L * beta[i] + 1);
      }
      weight *= table.value(g, beta);
      std::vector<long> tuple(beta.begin(), beta.end());
      rep.append(make_record("airy-oracle", "airy", "", g, n, std::move(tuple),
                             form.num.coeff(mono), weight, true));
      expected.emplace(mono, weight);
    }
    for (const auto& [mono, coef] : form.num.terms) {
      if (expected.count(mono)) continue;
      std::vector<long> tuple;
      for (int i = 0; i < n; ++i) tuple.push_back(mono_exp(mono, i));
      rep.append(make_record("airy-oracle", "airy", "", g, n, std::move(tuple), coef, 0, true,
                             "numerator monomial outside the intersection support"));
    }
  }
  rep.append(make_record("oracle-value", "dvv", "", 0, 3, {0, 0, 0},
                         dvv_intersection(0, {0, 0, 0}), 1, true));
  rep.append(make_record("oracle-value", "dvv", "", 1, 1, {1}, dvv_intersection(1, {1}),
                         Rat(1, 24), true));
  rep.append(make_record("oracle-value", "dvv", "", 2, 1, {4}, dvv_intersection(2, {4}),
                         Rat(1, 1152), true));
  try {
    int checked = table.check_string_consistency();
    rep.append(make_record("oracle-string", "dvv", "", 0, 0, {}, Rat(checked), Rat(checked), true,
                           "string equation replayed over all memoized entries"));
  } catch (const std::exception& e) {
    rep.append(make_record("oracle-string", "dvv", "", 0, 0, {}, 1, 0, true, e.what()));
  }
  rep.sort();
  return rep;
}

SuiteReport vanishing_suite(Workspace& ws, long max_b) {
  SuiteReport rep;
  rep.suite = "vanishing";
  CurveInstance ymon = make_instance("monomial", {{"m", "1"}});
  const std::vector<std::pair<int, int>> sum_scope = {{1, 1}, {1, 2}, {1, 3}, {2, 1}, {2, 2}};
  for (const auto& [g, n] : sum_scope) {
    const QuasiPolynomial& qp = ws.quasi(ymon.spec, g, n);
    long bound = 4L * g - 4 + 2 * n;
    for (const auto& b : tuple_grid(n, max_b)) {
      if (tuple_sum(b) > bound) continue;
      rep.append(make_record("vanish-sum-bound", ymon.preset, ymon.binding_text, g, n, b,
                             nval(qp, b), 0, true));
    }
  }
  const std::vector<std::pair<int, int>> ones_scope = {{0, 3}, {0, 4}, {0, 5},
                                                      {1, 2}, {1, 3}, {2, 2}};
  for (const std::string& m : {"1", "2", "3"}) {
    CurveInstance inst = make_instance("monomial", {{"m", m}});
    long mval = std::stol(m);
    for (const auto& [g, n] : ones_scope) {
      const QuasiPolynomial& qp = ws.quasi(inst.spec, g, n);
      std::vector<long> b(n, 1);
      b[0] = mval;
      rep.append(
          make_record("vanish-ones", inst.preset, inst.binding_text, g, n, b, nval(qp, b), 0,
                      true));
    }
  }
  CurveInstance disc = make_instance("discrete-surfaces", {{"u", "2"}});
  const std::vector<std::pair<int, int>> lattice_scope = {{1, 1}, {1, 2}, {1, 3}, {2, 1}, {2, 2}};
  for (const auto& [g, n] : lattice_scope) {
    const QuasiPolynomial& qp = ws.quasi(disc.spec, g, n);
    long bound = 2L * g + n;
    for (const auto& b : tuple_grid(n, max_b)) {
      if (tuple_sum(b) >= bound) continue;
      rep.append(make_record("vanish-lattice", disc.preset, disc.binding_text, g, n, b,
                             nval(qp, b), 0, true));
    }
  }
  rep.sort();
  return rep;
}

SuiteReport n0_suite(Workspace& ws, const std::vector<CurveInstance>& curves) {
  SuiteReport rep;
  rep.suite = "n0";
  auto run = [&](const CurveInstance& inst, int g) {
    const QuasiPolynomial& qp = ws.quasi(inst.spec, g, 1);
    int kn = 2 * qp.d + 3;
    DiscreteOp y1 = y_shift_operator(inst.spec, kn);
    DiscreteOp y2 = y_shift_operator(inst.spec, kn + 1);
    DiscreteOp D = DiscreteOp::shift(1);
    DiscreteOp one = DiscreteOp::unit();
    DiscreteOp dil = one - DiscreteOp::shift(2);
    DiscreteOp same = one + DiscreteOp::shift(2);
    auto f = [&qp](long m) { return Rat(m) * nval(qp, {m}); };
    rep.append(make_record("n0-opp-parity", inst.preset, inst.binding_text, g, 1, {},
                           apply_verified(D * y1, D * y2, f, -1), 0, true));
    rep.append(make_record("n0-same-parity", inst.preset, inst.binding_text, g, 1, {},
                           apply_verified(same * y1, same * y2, f, -1), 0, true));
    rep.append(make_record("n0-offset", inst.preset, inst.binding_text, g, 1, {},
                           apply_verified(dil * dil * y1, dil * dil * y2, f, -2), 0, true));
  };
  for (const auto& inst : curves) {
    run(inst, 2);
    if (inst.preset == "monomial" && inst.binding.get("m") == 1) run(inst, 3);
  }
  rep.sort();
  return rep;
}

namespace {

const std::vector<std::pair<int, int>> kSymmetryScope = {{0, 3}, {1, 1}, {0, 4}, {1, 2}, {2, 1}};

void compare_mirror(SuiteReport& rep, Workspace& ws, const std::string& equation,
                    const CurveInstance& plus, const CurveInstance& minus,
                    const std::function<int(int, int, int)>& sign_exp) {
  for (const auto& [g, n] : kSymmetryScope) {
    const QuasiPolynomial& qp = ws.quasi(plus.spec, g, n);
    const QuasiPolynomial& qm = ws.quasi(minus.spec, g, n);
    for (int k = 0; k <= n; ++k) {
      Rat sign = (sign_exp(g, n, k) % 2) ? Rat(-1) : Rat(1);
      bool pass = qp.classes.at(k) == qm.classes.at(k).scaled(sign);
      CheckRecord r;
      r.equation = equation;
      r.curve = plus.preset;
      r.binding = plus.binding_text + " vs " + minus.binding_text;
      r.g = g;
      r.n = n;
      r.tuple = {k};
      r.lhs = pass ? Rat(0) : Rat(1);
      r.rhs = 0;
      r.pass = pass;
      r.normative = true;
      rep.append(std::move(r));
    }
  }
}

}  // namespace

SuiteReport symmetry_suite(Workspace& ws) {
  SuiteReport rep;
  rep.suite = "symmetry";
  compare_mirror(rep, ws, "mirror-c", make_instance("ln+cz", {{"c", "2"}}),
                 make_instance("ln+cz", {{"c", "-2"}}),
                 [](int, int n, int k) { return n + k; });
  compare_mirror(rep, ws, "mirror-z0", make_instance("q-deformed", {{"z0", "2"}}),
                 make_instance("q-deformed", {{"z0", "-2"}}), [](int, int, int k) { return k; });
  // (t, gamma) -> (-t-1, -gamma) is u -> 1/u on the uniformizing parameter.
  compare_mirror(rep, ws, "mirror-u", make_instance("discrete-surfaces", {{"u", "2"}}),
                 make_instance("discrete-surfaces", {{"u", "1/2"}}),
                 [](int, int n, int) { return n; });
  rep.sort();
  return rep;
}

SuiteReport f_suite(Workspace& ws) {
  SuiteReport rep;
  rep.suite = "f";
  CurveInstance m1 = make_instance("monomial", {{"m", "1"}});
  CurveInstance lncurve = make_instance("ln", {});
  rep.append(make_record("f-value", m1.preset, m1.binding_text, 2, 0, {},
                         symplectic_F(ws, m1.spec, 2), Rat(-1, 240), true));
  rep.append(make_record("f-value", m1.preset, m1.binding_text, 3, 0, {},
                         symplectic_F(ws, m1.spec, 3), Rat(1, 1008), true));
  rep.append(make_record("f-value", lncurve.preset, lncurve.binding_text, 2, 0, {},
                         symplectic_F(ws, lncurve.spec, 2), 0, true));
  for (const std::string& m : {"1", "2", "3"}) {
    CurveInstance inst = make_instance("monomial", {{"m", m}});
    long mv = std::stol(m);
    std::vector<int> genera = {2};
    if (mv == 1) genera.push_back(3);
    for (int g : genera) {
      const QuasiPolynomial& qp = ws.quasi(inst.spec, g, 1);
      Rat direct = symplectic_F(ws, inst.spec, g);
      Rat shifted = (nval(qp, {mv + 1}) - nval(qp, {mv - 1})) / (Rat(mv) * Rat(2 * g - 2));
      rep.append(make_record("f-cross-route", inst.preset, inst.binding_text, g, 0, {}, direct,
                             shifted, true));
    }
  }
  CurveInstance disc = make_instance("discrete-surfaces", {{"u", "2"}});
  rep.append(make_record("f-conjecture", disc.preset, disc.binding_text, 2, 0, {},
                         symplectic_F(ws, disc.spec, 2), Rat(-51, 1280), false,
                         "asymptotic formula chi(M_2)(t^-2 + (t+1)^-2) at t=1/3"));
  rep.sort();
  return rep;
}

SuiteReport t_extraction_suite(Workspace& ws) {
  SuiteReport rep;
  rep.suite = "t-extraction";
  CurveInstance disc = make_instance("discrete-surfaces", {{"u", "2"}});
  Rat gamma = Rat(2, 3);  // u / (u^2 - 1) at u = 2
  const QuasiPolynomial& qp = ws.quasi(disc.spec, 2, 1);
  std::vector<Rat> expected(8);
  for (int l = 0; l <= 4; ++l) expected[l] = 0;
  expected[5] = Rat(-32, 9);
  expected[6] = Rat(80, 3);
  expected[7] = Rat(-980, 9);
  for (long l = 0; l <= 7; ++l)
    rep.append(make_record("t-extract", disc.preset, disc.binding_text, 2, 1, {l},
                           t_extraction(qp, {l}, gamma), expected[l], true));
  rep.sort();
  return rep;
}

namespace {

// Pairs and grid the printed-form (informational) recursion suites run on.
const std::vector<std::pair<int, int>> kPrintedPairs = {{0, 3}, {1, 1}, {1, 2}};

}  // namespace

SuiteReport monomial_recursion_suite(Workspace& ws, long max_b) {
  SuiteReport rep;
  rep.suite = "monomial-recursion";
  for (const std::string& mtext : {"1", "2", "3"}) {
    CurveInstance inst = make_instance("monomial", {{"m", mtext}});
    long m = std::stol(mtext);
    for (const auto& [g, n] : kPrintedPairs) {
      const QuasiPolynomial& src = ws.quasi(inst.spec, g, n);
      const QuasiPolynomial& tgt = ws.quasi(inst.spec, g, n + 1);
      for (const auto& b : tuple_grid(n, max_b)) {
        auto nt = [&tgt, &b](long arg) { return nval(tgt, with_first(arg, b)); };
        Rat all = string_sum(src, b, ParityRule::kAll);
        Rat nb = nval(src, b);
        rep.append(make_record("monomial-string", inst.preset, inst.binding_text, g, n, b, nt(m),
                               all, false));
        rep.append(make_record("monomial-same", inst.preset, inst.binding_text, g, n, b,
                               Rat(m + 1) * nt(m + 1) + Rat(m - 1) * nt(m - 1),
                               Rat(2 * m) * all - Rat(m) * Rat(tuple_sum(b)) * nb, false));
        rep.append(make_record("monomial-offset", inst.preset, inst.binding_text, g, n, b,
                               Rat(m - 2) * nt(m - 2) - Rat(2 * m) * nt(m) +
                                   Rat(m + 2) * nt(m + 2),
                               Rat(m) * offset_sum(src, b), false));
        rep.append(make_record("monomial-dilaton", inst.preset, inst.binding_text, g, n, b,
                               nt(m + 1) - nt(m - 1), Rat(m) * Rat(2 * g - 2 + n) * nb, false));
      }
    }
  }
  rep.sort();
  return rep;
}

SuiteReport ln_recursion_suite(Workspace& ws, long max_b) {
  SuiteReport rep;
  rep.suite = "ln-recursion";
  CurveInstance inst = make_instance("ln", {});
  for (const auto& [g, n] : kPrintedPairs) {
    const QuasiPolynomial& src = ws.quasi(inst.spec, g, n);
    const QuasiPolynomial& tgt = ws.quasi(inst.spec, g, n + 1);
    for (const auto& b : tuple_grid(n, max_b)) {
      Rat all = string_sum(src, b, ParityRule::kAll);
      Rat nb = nval(src, b);
      long chi = 2L - 2 * g - n;
      rep.append(make_record("ln-base0", inst.preset, inst.binding_text, g, n, b,
                             nval(tgt, with_first(0, b)), all, false));
      rep.append(make_record("ln-base1", inst.preset, inst.binding_text, g, n, b,
                             nval(tgt, with_first(1, b)),
                             all + Rat(chi - tuple_sum(b)) / Rat(2) * nb, false));
    }
  }
  rep.sort();
  return rep;
}

SuiteReport quad_recursion_suite(Workspace& ws, long max_b) {
  SuiteReport rep;
  rep.suite = "quad-recursion";
  CurveInstance inst = make_instance("quadrangulations", {{"gamma", "1"}, {"t4", "1/12"}});
  Rat g2 = inst.binding.get("gamma") * inst.binding.get("gamma");
  Rat t4g4 = inst.binding.get("t4") * g2 * g2;
  Rat t = g2 - Rat(3) * t4g4;
  for (const auto& [g, n] : kPrintedPairs) {
    const QuasiPolynomial& src = ws.quasi(inst.spec, g, n);
    const QuasiPolynomial& tgt = ws.quasi(inst.spec, g, n + 1);
    for (const auto& b : tuple_grid(n, max_b)) {
      auto nt = [&tgt, &b](long arg) { return nval(tgt, with_first(arg, b)); };
      Rat all = string_sum(src, b, ParityRule::kAll);
      Rat nb = nval(src, b);
      rep.append(make_record("quad-r1", inst.preset, inst.binding_text, g, n, b,
                             t * nt(1) - Rat(3) * t4g4 * nt(3), all, false));
      rep.append(make_record("quad-r2", inst.preset, inst.binding_text, g, n, b,
                             Rat(2) * (t - t4g4) * nt(2) - Rat(4) * t4g4 * nt(4),
                             Rat(2) * all - Rat(tuple_sum(b)) * nb, false));
      rep.append(make_record("quad-r3", inst.preset, inst.binding_text, g, n, b,
                             (t - t4g4) * nt(1) + Rat(3) * (t - Rat(2) * t4g4) * nt(3) +
                                 Rat(5) * t4g4 * nt(5),
                             offset_sum(src, b), false));
      rep.append(make_record("quad-r4", inst.preset, inst.binding_text, g, n, b,
                             -t * nt(0) + (t + t4g4) * nt(2) - t4g4 * nt(4),
                             Rat(2 * g - 2 + n) * nb, false));
    }
  }
  rep.sort();
  return rep;
}

SuiteReport integrality_suite(Workspace& ws, long max_b) {
  SuiteReport rep;
  rep.suite = "integrality";
  std::vector<CurveInstance> insts;
  for (const std::string& m : {"1", "2", "3"}) insts.push_back(make_instance("monomial", {{"m", m}}));
  insts.push_back(make_instance("ln", {}));
  for (const auto& inst : insts) {
    for (int n : {3, 4, 5}) {
      const QuasiPolynomial& qp = ws.quasi(inst.spec, 0, n);
      long bad = 0;
      std::vector<CheckRecord> details;
      for (const auto& b : tuple_grid(n, max_b)) {
        Rat v = nval(qp, b);
        if (v.get_den() == 1) continue;
        ++bad;
        if (details.size() < 20)
          details.push_back(make_record("integral-values", inst.preset, inst.binding_text, 0, n,
                                        b, v, 0, false, "non-integer value"));
      }
      std::ostringstream note;
      note << "genus 0 values at all tuples with entries in [1," << max_b << "] are integers";
      rep.append(make_record("integral-values", inst.preset, inst.binding_text, 0, n, {},
                             Rat(bad), 0, false, note.str()));
      for (auto& r : details) rep.append(std::move(r));
    }
  }
  rep.sort();
  return rep;
}

}  // namespace eo
