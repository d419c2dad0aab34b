#include "eo/frac.hpp"

#include <stdexcept>

namespace eo {

namespace {

// root_kind as in MultiPoly::div_linear: +1 for (1-v), -1 for (1+v), 0 for v.
bool divisible_by(const MultiPoly& p, int var, int root_kind) {
    if (!p.uses_var(var)) return p.is_zero();
    if (root_kind == 0) return p.eval_var(var, Rat(0)).is_zero();
    return p.eval_var(var, Rat(root_kind)).is_zero();
}

MultiPoly factor_poly(int var, int root_kind) {
    MultiPoly v = MultiPoly::variable(var);
    if (root_kind == 0) return v;
    MultiPoly one = MultiPoly::constant(Rat(1));
    return root_kind == 1 ? one - v : one + v;
}

} // namespace

void Frac::simplify() {
    if (num.is_zero()) {
        one_minus.fill(0);
        one_plus.fill(0);
        bare.fill(0);
        return;
    }
    for (int v = 0; v < kMaxVars; ++v) {
        while (one_minus[v] > 0 && divisible_by(num, v, 1)) {
            num = num.div_linear(v, 1);
            --one_minus[v];
        }
        while (one_plus[v] > 0 && divisible_by(num, v, -1)) {
            num = num.div_linear(v, -1);
            --one_plus[v];
        }
        while (bare[v] > 0 && divisible_by(num, v, 0)) {
            num = num.div_linear(v, 0);
            --bare[v];
        }
    }
}

Frac Frac::over(int var, unsigned em, unsigned ep, unsigned e0) const {
    if (var < 0 || var >= kMaxVars) throw std::invalid_argument("Frac::over: bad variable");
    Frac out = *this;
    if (out.is_zero()) return out;
    out.one_minus[var] = static_cast<uint16_t>(out.one_minus[var] + em);
    out.one_plus[var] = static_cast<uint16_t>(out.one_plus[var] + ep);
    out.bare[var] = static_cast<uint16_t>(out.bare[var] + e0);
    out.simplify();
    return out;
}

Frac Frac::operator-() const {
    Frac out = *this;
    out.num = -out.num;
    return out;
}

Frac Frac::operator+(const Frac& rhs) const {
    if (is_zero()) return rhs;
    if (rhs.is_zero()) return *this;
    Frac out;
    MultiPoly a = num;
    MultiPoly b = rhs.num;
    for (int v = 0; v < kMaxVars; ++v) {
        uint16_t em = std::max(one_minus[v], rhs.one_minus[v]);
        uint16_t ep = std::max(one_plus[v], rhs.one_plus[v]);
        uint16_t e0 = std::max(bare[v], rhs.bare[v]);
        out.one_minus[v] = em;
        out.one_plus[v] = ep;
        out.bare[v] = e0;
        if (em > one_minus[v]) a = a * factor_poly(v, 1).pow(em - one_minus[v]);
        if (em > rhs.one_minus[v]) b = b * factor_poly(v, 1).pow(em - rhs.one_minus[v]);
        if (ep > one_plus[v]) a = a * factor_poly(v, -1).pow(ep - one_plus[v]);
        if (ep > rhs.one_plus[v]) b = b * factor_poly(v, -1).pow(ep - rhs.one_plus[v]);
        if (e0 > bare[v]) a = a * factor_poly(v, 0).pow(e0 - bare[v]);
        if (e0 > rhs.bare[v]) b = b * factor_poly(v, 0).pow(e0 - rhs.bare[v]);
    }
    out.num = a + b;
    out.simplify();
    return out;
}

Frac Frac::operator*(const Frac& rhs) const {
    if (is_zero() || rhs.is_zero()) return Frac();
    Frac out;
    out.num = num * rhs.num;
    for (int v = 0; v < kMaxVars; ++v) {
        out.one_minus[v] = static_cast<uint16_t>(one_minus[v] + rhs.one_minus[v]);
        out.one_plus[v] = static_cast<uint16_t>(one_plus[v] + rhs.one_plus[v]);
        out.bare[v] = static_cast<uint16_t>(bare[v] + rhs.bare[v]);
    }
    out.simplify();
    return out;
}

Frac Frac::scaled(const Rat& c) const {
    if (c == 0) return Frac();
    Frac out = *this;
    out.num = out.num.scaled(c);
    return out;
}

RationalFunction Frac::to_rational() const {
    MultiPoly den = MultiPoly::constant(Rat(1));
    for (int v = 0; v < kMaxVars; ++v) {
        if (one_minus[v]) den = den * factor_poly(v, 1).pow(one_minus[v]);
        if (one_plus[v]) den = den * factor_poly(v, -1).pow(one_plus[v]);
        if (bare[v]) den = den * factor_poly(v, 0).pow(bare[v]);
    }
    return RationalFunction::make(num, den);
}

}  // namespace eo
