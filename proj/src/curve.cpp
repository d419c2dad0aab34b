#include "eo/curve.hpp"

#include <json.hpp>

#include <sstream>
#include <stdexcept>

#include "eo/series.hpp"

namespace eo {

namespace {

using nlohmann::json;

constexpr int kQJetDepth = 28;
constexpr int kLnJetDepth = 28;

Rat get_or_throw(const ParamBinding& b, const std::string& name) {
    auto it = b.values.find(name);
    if (it == b.values.end()) throw std::invalid_argument("missing parameter " + name);
    return it->second;
}

// Formal derivative of a Taylor series in its parameter.
Series<Rat> series_deriv(const Series<Rat>& f) {
    if (f.lo != 0) throw std::invalid_argument("series_deriv expects a Taylor window");
    int n = static_cast<int>(f.coeffs.size());
    Series<Rat> out = series_zero<Rat>(0, std::max(n - 2, 0));
    for (int k = 1; k < n; ++k) out.set(k - 1, f.at(k) * Rat(k));
    return out;
}

// log of a series with constant term 1, computed as the antiderivative of
// f'/f; orders 0..N.
Series<Rat> series_log1(const Series<Rat>& f, int N) {
    if (f.at(0) != Rat(1)) throw std::invalid_argument("series_log1: constant term must be 1");
    Series<Rat> g = series_mul(series_deriv(f), series_inverse(f, N), 0, N - 1);
    Series<Rat> out = series_zero<Rat>(0, N);
    for (int k = 1; k <= N; ++k) out.set(k, g.at(k - 1) / Rat(k));
    return out;
}

// Inverse of u = -2t - t^2 as a series t(u), orders 1..N.
Series<Rat> u_inverse_series(int N) {
    Series<Rat> u = series_zero<Rat>(0, N);
    if (N >= 1) u.set(1, Rat(1));
    Series<Rat> t = series_zero<Rat>(0, N);
    for (int it = 0; it <= N + 1; ++it) {
        Series<Rat> t2 = series_mul(t, t, 0, N);
        Series<Rat> next = series_zero<Rat>(0, N);
        for (int k = 0; k <= N; ++k) next.set(k, (u.at(k) + t2.at(k)) / Rat(-2));
        t = next;
    }
    return t;
}

// Composition f(g(u)) for a Taylor series f and a series g with g(0) = 0.
Series<Rat> series_compose(const Series<Rat>& f, const Series<Rat>& g, int N) {
    if (g.at(0) != Rat(0)) throw std::invalid_argument("series_compose: inner constant term must be 0");
    Series<Rat> acc = series_zero<Rat>(0, N);
    int top = f.hi();
    for (int j = top; j >= 0; --j) {
        acc = series_mul(acc, g, 0, N);
        acc.set(0, acc.at(0) + f.at(j));
    }
    return acc;
}

// Builds jet lists from the Taylor germs of y at +1 (in t = z-1) and at -1
// (in s = z+1), both to order N.
YData jets_from_germs(const Series<Rat>& at_plus, const Series<Rat>& at_minus, int N) {
    Series<Rat> reflected = series_zero<Rat>(0, N);
    for (int k = 0; k <= N; ++k) {
        Rat c = at_minus.at(k);
        reflected.set(k, k % 2 == 0 ? c : -c);
    }
    Series<Rat> even = series_zero<Rat>(0, N);
    Series<Rat> odd = series_zero<Rat>(0, N);
    for (int k = 0; k <= N; ++k) {
        even.set(k, (at_plus.at(k) + reflected.at(k)) / Rat(2));
        odd.set(k, (at_plus.at(k) - reflected.at(k)) / Rat(2));
    }
    Series<Rat> t_of_u = u_inverse_series(N);
    Series<Rat> a_series = series_compose(even, t_of_u, N);
    Series<Rat> b_num = series_compose(odd, t_of_u, N);
    Series<Rat> one_plus_t = t_of_u;
    one_plus_t.set(0, Rat(1));
    Series<Rat> b_series = series_mul(b_num, series_inverse(one_plus_t, N + 1), 0, N);

    std::vector<Rat> ak(static_cast<std::size_t>(N) + 1);
    std::vector<Rat> bk(static_cast<std::size_t>(N) + 1);
    for (int k = 0; k <= N; ++k) {
        ak[static_cast<std::size_t>(k)] = a_series.at(k);
        bk[static_cast<std::size_t>(k)] = b_series.at(k);
    }
    return YData::jets(std::move(ak), std::move(bk));
}

// Taylor germ of a univariate rational function at a finite point; errors on
// a pole there.
Series<Rat> rational_germ(const RationalFunction& y, const Rat& point, int N) {
    auto s = laurent_expand(y, 0, ExpansionPoint::at(point), N);
    if (s.lo < 0) {
        for (int k = s.lo; k < 0; ++k)
            if (!s.at(k).is_zero())
                throw std::invalid_argument("jets_from_rational: pole at z=" + rat_str(point));
    }
    Series<Rat> out = series_zero<Rat>(0, N);
    for (int k = 0; k <= N; ++k) out.set(k, rf_constant(s.at(k)));
    return out;
}

// Taylor series of 1/(c + t) to order N; c must be nonzero.
Series<Rat> reciprocal_shift_series(const Rat& c, int N) {
    Series<Rat> out = series_zero<Rat>(0, N);
    Rat p = 1 / c;
    for (int k = 0; k <= N; ++k) {
        out.set(k, p);
        p = -p / c;
    }
    return out;
}

// Germ at z = c + t of y = ln(h)/(2x) with h = (1 - z/z0)/(z^2 - z/z0),
// valid because h(c) = 1 at both branch points.
Series<Rat> q_deformed_germ(const Rat& z0, const Rat& a, const Rat& b, const Rat& c, int N) {
    Series<Rat> n = series_zero<Rat>(0, N);
    n.set(0, Rat(1) - c / z0);
    n.set(1, Rat(-1) / z0);
    Series<Rat> d = series_zero<Rat>(0, N);
    d.set(0, c * c - c / z0);
    d.set(1, Rat(2) * c - Rat(1) / z0);
    d.set(2, Rat(1));
    Rat n0 = n.at(0);
    Rat d0 = d.at(0);
    if (n0 != d0 || n0 == 0)
        throw std::invalid_argument("q-deformed germ: log argument not normalized");
    Series<Rat> L = series_add(series_log1(series_scale(n, 1 / n0), N),
                               series_neg(series_log1(series_scale(d, 1 / d0), N)));

    Series<Rat> x = reciprocal_shift_series(c, N);
    for (std::size_t i = 0; i < x.coeffs.size(); ++i) x.coeffs[i] *= b;
    x.set(0, x.at(0) + a + b * c);
    x.set(1, x.at(1) + b);
    Series<Rat> inv2x = series_inverse(series_scale(x, Rat(2)), N + 1);
    return series_mul(L, inv2x, 0, N);
}

std::string rat_json(const Rat& v) { return rat_str(v); }

json poly_to_json(const MultiPoly& p) {
    json arr = json::array();
    if (p.is_zero()) {
        arr.push_back("0");
        return arr;
    }
    if (p.max_var() > 0) throw std::invalid_argument("curve y must be univariate in z");
    auto c = p.dense(0);
    for (const Rat& v : c) arr.push_back(rat_json(v));
    return arr;
}

MultiPoly poly_from_json(const json& arr) {
    if (!arr.is_array() || arr.empty()) throw std::invalid_argument("polynomial must be a nonempty array");
    std::vector<Rat> c;
    for (const auto& e : arr) c.push_back(rat_parse(e.get<std::string>()));
    return MultiPoly::from_dense(0, c);
}

std::vector<Rat> rats_from_json(const json& arr) {
    if (!arr.is_array()) throw std::invalid_argument("jet list must be an array");
    std::vector<Rat> out;
    for (const auto& e : arr) out.push_back(rat_parse(e.get<std::string>()));
    return out;
}

json curve_doc(const CurveSpec& spec, bool with_label) {
    json y;
    if (spec.y.is_rational) {
        y = {{"kind", "rational"},
             {"num", poly_to_json(spec.y.y.num)},
             {"den", poly_to_json(spec.y.y.den)}};
    } else {
        json a = json::array();
        for (const Rat& v : spec.y.ak) a.push_back(rat_json(v));
        json b = json::array();
        for (const Rat& v : spec.y.bk) b.push_back(rat_json(v));
        y = {{"kind", "jets"}, {"a", a}, {"b", b}};
    }
    json doc = {{"a", rat_json(spec.a)}, {"b", rat_json(spec.b)}, {"y", y}};
    if (with_label) doc["label"] = spec.label;
    return doc;
}

} // namespace

int YData::jet_depth() const {
    return static_cast<int>(std::max(ak.size(), bk.size())) - 1;
}

const Rat& ParamBinding::get(const std::string& name) const {
    auto it = values.find(name);
    if (it == values.end()) throw std::invalid_argument("missing parameter " + name);
    return it->second;
}

Rat rf_constant(const RationalFunction& f) {
    if (!f.num.is_constant() || !f.den.is_constant())
        throw std::invalid_argument("rational function is not constant");
    return f.num.coeff(mono_one()) / f.den.coeff(mono_one());
}

RationalFunction subst_reciprocal(const RationalFunction& f, int var) {
    unsigned dn = static_cast<unsigned>(std::max(f.num.degree_in(var), 0));
    unsigned dd = static_cast<unsigned>(std::max(f.den.degree_in(var), 0));
    unsigned D = std::max(dn, dd);
    return RationalFunction::make(f.num.reverse_var(var, D), f.den.reverse_var(var, D));
}

CurveDiag validate_curve(const CurveSpec& spec) {
    CurveDiag diag;
    diag.x_second_plus = Rat(2) * spec.b;
    diag.x_second_minus = Rat(-2) * spec.b;
    if (spec.b == 0) diag.errors.push_back("b=0");

    bool plus_regular = true;
    bool minus_regular = true;
    if (spec.y.is_rational) {
        const RationalFunction& y = spec.y.y;
        if (y.num.max_var() > 0 || y.den.max_var() > 0)
            diag.errors.push_back("y not univariate in z");
        else {
            if (y.den.eval_var(0, Rat(1)).is_zero()) {
                diag.errors.push_back("y pole at z=1");
                plus_regular = false;
            }
            if (y.den.eval_var(0, Rat(-1)).is_zero()) {
                diag.errors.push_back("y pole at z=-1");
                minus_regular = false;
            }
            if (plus_regular || minus_regular) {
                RationalFunction dy = y.derivative(0);
                if (plus_regular) diag.y_prime_plus = dy.eval(std::vector<Rat>{Rat(1)});
                if (minus_regular) diag.y_prime_minus = dy.eval(std::vector<Rat>{Rat(-1)});
            }
        }
    } else {
        auto jet = [&](const std::vector<Rat>& v, std::size_t k) {
            return k < v.size() ? v[k] : Rat(0);
        };
        Rat a1 = jet(spec.y.ak, 1);
        Rat b0 = jet(spec.y.bk, 0);
        Rat b1 = jet(spec.y.bk, 1);
        diag.y_prime_plus = b0 - Rat(2) * (a1 + b1);
        diag.y_prime_minus = b0 + Rat(2) * (a1 - b1);
    }
    if (plus_regular && diag.y_prime_plus == 0) diag.errors.push_back("y'(1)=0");
    if (minus_regular && diag.y_prime_minus == 0) diag.errors.push_back("y'(-1)=0");
    diag.ok = diag.errors.empty();
    return diag;
}

YData jets_from_rational(const RationalFunction& y, int N) {
    if (N < 0) throw std::invalid_argument("jets_from_rational: negative depth");
    if (y.num.max_var() > 0 || y.den.max_var() > 0)
        throw std::invalid_argument("jets_from_rational: y must be univariate in z");
    Series<Rat> at_plus = rational_germ(y, Rat(1), N);
    Series<Rat> at_minus = rational_germ(y, Rat(-1), N);
    return jets_from_germs(at_plus, at_minus, N);
}

RationalFunction partial_sum_y(const YData& jets, int N) {
    if (jets.is_rational) throw std::invalid_argument("partial_sum_y: jet data required");
    if (N < 0) throw std::invalid_argument("partial_sum_y: negative depth");
    if (N > jets.jet_depth())
        throw std::invalid_argument("partial_sum_y: jet lists end at index " +
                                    std::to_string(jets.jet_depth()) + ", need " + std::to_string(N));
    MultiPoly z = MultiPoly::variable(0);
    MultiPoly one = MultiPoly::constant(Rat(1));
    MultiPoly base = one - z * z;
    MultiPoly acc;
    MultiPoly base_pow = one;
    for (int k = 0; k <= N; ++k) {
        Rat a = k < static_cast<int>(jets.ak.size()) ? jets.ak[static_cast<std::size_t>(k)] : Rat(0);
        Rat b = k < static_cast<int>(jets.bk.size()) ? jets.bk[static_cast<std::size_t>(k)] : Rat(0);
        MultiPoly term = MultiPoly::constant(a) + z.scaled(b);
        acc = acc + term * base_pow;
        if (k < N) base_pow = base_pow * base;
    }
    return RationalFunction::poly(acc);
}

Kernel kernel(const CurveSpec& spec, int N) {
    CurveDiag diag = validate_curve(spec);
    if (!diag.ok) {
        std::string msg = "kernel: invalid curve:";
        for (const auto& e : diag.errors) msg += " " + e;
        throw std::invalid_argument(msg);
    }
    Kernel k;
    k.spec = spec;
    k.depth = N;
    if (spec.y.is_rational) {
        k.ybar = spec.y.y;
    } else {
        if (N > spec.y.jet_depth())
            throw std::invalid_argument("kernel: jet data ends at index " +
                                        std::to_string(spec.y.jet_depth()) + ", need " +
                                        std::to_string(N));
        k.ybar = partial_sum_y(spec.y, N);
    }
    k.ydel = k.ybar - subst_reciprocal(k.ybar, 0);
    MultiPoly z = MultiPoly::variable(0);
    MultiPoly one = MultiPoly::constant(Rat(1));
    k.xprime = RationalFunction::make((z * z - one).scaled(spec.b), z * z);
    return k;
}

Rat Kernel::eval_scalar(const Rat& z0v, const Rat& zv) const {
    if (zv == 0) throw std::invalid_argument("kernel evaluation at z=0");
    Rat zr = 1 / zv;
    if (z0v == zv || z0v == zr)
        throw std::invalid_argument("kernel evaluation on the diagonal");
    Rat bracket = 1 / (z0v - zv) - 1 / (z0v - zr);
    Rat dd = Rat(2) * ydel.eval(std::vector<Rat>{zv}) * xprime.eval(std::vector<Rat>{zv});
    if (dd == 0) throw std::invalid_argument("kernel evaluation at a branch point");
    return -bracket / dd;
}

CurveSpec catalog_instantiate(const std::string& name, const ParamBinding& binding) {
    MultiPoly z = MultiPoly::variable(0);
    CurveSpec spec;
    if (name == "monomial") {
        Rat m = get_or_throw(binding, "m");
        if (m.get_den() != 1 || m < 1)
            throw std::invalid_argument("monomial exponent m must be a positive integer");
        unsigned mu = static_cast<unsigned>(m.get_num().get_ui());
        spec.a = 0;
        spec.b = 1;
        spec.y = YData::rational(RationalFunction::poly(z.pow(mu).scaled(1 / m)));
        spec.label = "monomial m=" + rat_str(m);
        return spec;
    }
    if (name == "ln" || name == "ln+cz") {
        std::vector<Rat> ak(kLnJetDepth + 1, Rat(0));
        for (int k = 1; k <= kLnJetDepth; ++k) ak[static_cast<std::size_t>(k)] = Rat(-1, 2 * k);
        std::vector<Rat> bk(kLnJetDepth + 1, Rat(0));
        spec.a = 0;
        spec.b = 1;
        spec.label = "ln";
        if (name == "ln+cz") {
            Rat c = get_or_throw(binding, "c");
            bk[0] = c;
            spec.label = "ln+cz c=" + rat_str(c);
        }
        spec.y = YData::jets(std::move(ak), std::move(bk));
        return spec;
    }
    if (name == "q-deformed") {
        Rat z0 = get_or_throw(binding, "z0");
        if (z0 == 0) throw std::invalid_argument("z0=0");
        if (z0 == 1) throw std::invalid_argument("z0=1");
        if (z0 == -1) throw std::invalid_argument("z0=-1");
        spec.a = Rat(1) + 1 / (z0 * z0);
        spec.b = Rat(-1) / z0;
        Series<Rat> at_plus = q_deformed_germ(z0, spec.a, spec.b, Rat(1), kQJetDepth);
        Series<Rat> at_minus = q_deformed_germ(z0, spec.a, spec.b, Rat(-1), kQJetDepth);
        spec.y = jets_from_germs(at_plus, at_minus, kQJetDepth);
        spec.label = "q-deformed z0=" + rat_str(z0);
        return spec;
    }
    if (name == "discrete-surfaces") {
        Rat u = get_or_throw(binding, "u");
        if (u == 0) throw std::invalid_argument("u=0");
        if (u == 1) throw std::invalid_argument("u=1");
        if (u == -1) throw std::invalid_argument("u=-1");
        Rat t = 1 / (u * u - 1);
        Rat g = u / (u * u - 1);
        spec.a = Rat(-2) * t;
        spec.b = g;
        spec.y = YData::rational(RationalFunction::make(
            MultiPoly::constant(t), MultiPoly::constant(t) - z.scaled(g)));
        spec.label = "discrete-surfaces u=" + rat_str(u);
        return spec;
    }
    if (name == "quadrangulations") {
        Rat g = get_or_throw(binding, "gamma");
        Rat t4 = get_or_throw(binding, "t4");
        if (g == 0) throw std::invalid_argument("gamma=0");
        Rat g2 = g * g;
        Rat t = g2 - Rat(3) * t4 * g2 * g2;
        // The closed constraint gamma^2 = (1 - sqrt(1-12 t t4))/(6 t4) holds
        // on the branch with 1 - 6 t4 gamma^2 >= 0.
        if (t4 != 0 && Rat(1) - Rat(6) * t4 * g2 < 0)
            throw std::invalid_argument("quadrangulations: binding on the wrong branch of the t constraint");
        // x = z + 1/z for this family; gamma enters only through y.
        spec.a = 0;
        spec.b = 1;
        spec.y = YData::rational(RationalFunction::poly(
            z.scaled(t) - z.pow(3).scaled(t4 * g2 * g2)));
        spec.label = "quadrangulations gamma=" + rat_str(g) + " t4=" + rat_str(t4);
        return spec;
    }
    throw std::invalid_argument("unknown preset: " + name);
}

CurveSpec curve_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("curve document is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument("curve document must be a JSON object");
    CurveSpec spec;
    spec.a = rat_parse(doc.at("a").get<std::string>());
    spec.b = rat_parse(doc.at("b").get<std::string>());
    const json& y = doc.at("y");
    std::string kind = y.at("kind").get<std::string>();
    if (kind == "rational") {
        spec.y = YData::rational(RationalFunction::make(poly_from_json(y.at("num")),
                                                        poly_from_json(y.at("den"))));
    } else if (kind == "jets") {
        spec.y = YData::jets(rats_from_json(y.at("a")), rats_from_json(y.at("b")));
    } else {
        throw std::invalid_argument("unknown y kind: " + kind);
    }
    if (doc.contains("label")) spec.label = doc.at("label").get<std::string>();
    return spec;
}

std::string curve_to_json(const CurveSpec& spec) {
    return curve_doc(spec, true).dump(2);
}

std::string curve_fingerprint(const CurveSpec& spec) {
    std::string canon = curve_doc(spec, false).dump();
    uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream out;
    out << std::hex;
    for (int i = 15; i >= 0; --i) out << ((h >> (4 * i)) & 0xF);
    return out.str();
}

}  // namespace eo
