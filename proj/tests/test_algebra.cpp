#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "eo/frac.hpp"
#include "eo/multipoly.hpp"
#include "eo/ratfun.hpp"
#include "eo/rational.hpp"
#include "eo/series.hpp"

using namespace eo;

namespace {

MultiPoly zvar(int i = 0) { return MultiPoly::variable(i); }

RationalFunction rf(const MultiPoly& n, const MultiPoly& d) {
    return RationalFunction::make(n, d);
}

} // namespace

TEST_CASE("rational parsing and powers") {
    CHECK(rat_parse("3/6") == Rat(1, 2));
    CHECK(rat_parse("-7") == Rat(-7));
    CHECK_THROWS_AS(rat_parse("1/0"), std::invalid_argument);
    CHECK(rat_str(Rat(-3, 9)) == "-1/3");
    CHECK(rat_pow(Rat(2, 3), 3) == Rat(8, 27));
    CHECK(rat_pow(Rat(2, 3), -2) == Rat(9, 4));
    CHECK(rat_pow(Rat(5), 0) == Rat(1));
    CHECK_THROWS_AS(rat_pow(Rat(0), -1), std::invalid_argument);
}

TEST_CASE("combinatorial helpers") {
    CHECK(factorial(0) == Int(1));
    CHECK(factorial(5) == Int(120));
    CHECK(double_factorial(-1) == Int(1));
    CHECK(double_factorial(0) == Int(1));
    CHECK(double_factorial(5) == Int(15));
    CHECK(double_factorial(6) == Int(48));
    CHECK(binomial_general(5, 2) == Rat(10));
    CHECK(binomial_general(-1, 3) == Rat(-1));
    CHECK(binomial_general(4, 0) == Rat(1));
    CHECK(binomial_general(3, 5) == Rat(0));
}

TEST_CASE("polynomial arithmetic and ordering") {
    MultiPoly z = zvar(0);
    MultiPoly one = MultiPoly::constant(1);
    MultiPoly a = one - z * z;           // 1 - z^2
    MultiPoly b = one + z * z;           // 1 + z^2
    MultiPoly prod = a * b;
    CHECK(prod == one - z.pow(4));
    CHECK(prod.degree_in(0) == 4);
    CHECK(prod.total_degree() == 4);

    MultiPoly half_z = z.scaled(Rat(1, 2)) + z.scaled(Rat(1, 3));
    CHECK(half_z == z.scaled(Rat(5, 6)));

    MultiPoly w = zvar(1);
    MultiPoly mixed = z * w + z + w;
    CHECK(mixed.coeff_of(0, 1) == w + one);
    CHECK(mixed.eval_var(1, Rat(2)) == z.scaled(Rat(3)) + MultiPoly::constant(2));
    CHECK(mixed.uses_var(1));
    CHECK_FALSE(mixed.uses_var(2));
    CHECK(mixed.max_var() == 1);

    std::vector<Rat> pt = {Rat(2), Rat(3)};
    CHECK(mixed.eval(pt) == Rat(11));
}

TEST_CASE("polynomial division helpers") {
    MultiPoly z = zvar(0);
    MultiPoly one = MultiPoly::constant(1);

    // (1 - z^2) = (1 - z)(1 + z); synthetic division by each linear factor.
    MultiPoly p = one - z * z;
    CHECK(p.div_linear(0, 1) == one + z);
    CHECK(p.div_linear(0, -1) == one - z);
    CHECK_THROWS_AS((one + z).div_linear(0, 1), std::invalid_argument);

    MultiPoly q = z.pow(3) - z;
    CHECK(q.div_linear(0, 0) == z * z - one);

    MultiPoly w = zvar(1);
    MultiPoly r = (one - z) * (w + z);
    CHECK(r.div_linear(0, 1) * (one - z) == r);
}

TEST_CASE("dense coefficient round trip") {
    MultiPoly z = zvar(0);
    MultiPoly p = z.pow(4).scaled(Rat(3)) - z.scaled(Rat(1, 2)) + MultiPoly::constant(7);
    auto c = p.dense(0);
    REQUIRE(c.size() == 5);
    CHECK(c[0] == Rat(7));
    CHECK(c[1] == Rat(-1, 2));
    CHECK(c[4] == Rat(3));
    CHECK(MultiPoly::from_dense(0, c) == p);

    MultiPoly rev = p.reverse_var(0, 4);
    auto rc = rev.dense(0);
    CHECK(rc[0] == Rat(3));
    CHECK(rc[4] == Rat(7));
}

TEST_CASE("contract and rename") {
    MultiPoly z = zvar(0);
    MultiPoly w = zvar(1);
    MultiPoly p = z * z * w + w.scaled(Rat(2)) + z;
    // Weight vector indexed by exponent of var 0.
    std::vector<Rat> weights = {Rat(1), Rat(10), Rat(100)};
    MultiPoly c = p.contract_var(0, weights);
    CHECK(c == w.scaled(Rat(102)) + MultiPoly::constant(10));

    std::array<int, kMaxVars> perm{};
    for (int i = 0; i < kMaxVars; ++i) perm[i] = i;
    perm[0] = 1;
    perm[1] = 0;
    CHECK(p.rename_vars(perm) == w * w * z + z.scaled(Rat(2)) + w);
}

TEST_CASE("gcd and exact division") {
    MultiPoly z = zvar(0);
    MultiPoly x = zvar(1);
    MultiPoly one = MultiPoly::constant(1);
    MultiPoly g = (one - z) * (x + z);
    MultiPoly h = (one - z) * (x - z);
    MultiPoly d = poly_gcd(g, h);
    CHECK(poly_divexact(g, d) * d == g);
    CHECK(poly_divexact(h, d) * d == h);
    CHECK(d.total_degree() == 1);

    CHECK(poly_gcd(MultiPoly::constant(0), h) == poly_gcd(h, h));
}

TEST_CASE("rational function canonical form") {
    MultiPoly z = zvar(0);
    MultiPoly one = MultiPoly::constant(1);
    RationalFunction f = rf(z * z - one, z - one);
    CHECK(f.den == one);
    CHECK(f.num == z + one);

    RationalFunction g = rf(one, one - z * z);
    RationalFunction h = g + g;
    CHECK(h.num == MultiPoly::constant(-2));
    CHECK(h.den == z * z - one);

    CHECK_THROWS_AS(rf(one, MultiPoly::constant(0)), std::invalid_argument);

    RationalFunction prod = g * rf(one - z, one);
    // (1-z)/(1-z^2) reduces to 1/(1+z).
    CHECK(prod.num == one);
    CHECK(prod.den == z + one);
}

TEST_CASE("rational function evaluation and derivative") {
    MultiPoly z = zvar(0);
    MultiPoly one = MultiPoly::constant(1);
    RationalFunction f = rf(one, one - z * z);
    CHECK(f.eval_var(0, Rat(2)).num == MultiPoly::constant(Rat(-1, 3)));
    RationalFunction df = f.derivative(0);
    // d/dz 1/(1-z^2) = 2z/(1-z^2)^2
    RationalFunction expect = rf(z.scaled(Rat(2)), (one - z * z).pow(2));
    CHECK(df == expect);
}

TEST_CASE("laurent expansion at a finite point") {
    MultiPoly z = zvar(0);
    MultiPoly one = MultiPoly::constant(1);
    RationalFunction f = rf(one, one - z * z);

    auto s = laurent_expand(f, 0, ExpansionPoint::at(Rat(1)), 1);
    CHECK(s.lo == -1);
    CHECK(s.at(-1) == RationalFunction::constant(Rat(-1, 2)));
    CHECK(s.at(0) == RationalFunction::constant(Rat(1, 4)));

    auto s0 = laurent_expand(rf(one, (one - z * z).pow(2)), 0, ExpansionPoint::at(Rat(0)), 5);
    std::vector<Rat> expect = {Rat(1), Rat(0), Rat(2), Rat(0), Rat(3), Rat(0)};
    for (int k = 0; k <= 5; ++k) {
        CHECK(s0.at(k) == RationalFunction::constant(expect[static_cast<size_t>(k)]));
    }
}

TEST_CASE("laurent expansion at infinity") {
    MultiPoly z = zvar(0);
    MultiPoly one = MultiPoly::constant(1);
    // z^3/(z-1) = z^2 + z + 1 + 1/(z-1); at infinity in t = 1/z the
    // expansion starts at order -2.
    RationalFunction f = rf(z.pow(3), z - one);
    auto s = laurent_expand(f, 0, ExpansionPoint::infinity(), 4);
    CHECK(s.lo == -2);
    CHECK(s.at(-2) == RationalFunction::constant(Rat(1)));
    CHECK(s.at(-1) == RationalFunction::constant(Rat(1)));
    CHECK(s.at(0) == RationalFunction::constant(Rat(1)));
    CHECK(s.at(1) == RationalFunction::constant(Rat(1)));
    CHECK(s.at(2) == RationalFunction::constant(Rat(1)));
}

TEST_CASE("expansion with spectator variables") {
    MultiPoly z = zvar(0);
    MultiPoly w = zvar(1);
    MultiPoly one = MultiPoly::constant(1);
    // 1/(w - z) around z = 0: coefficients 1/w^{k+1}.
    RationalFunction f = rf(one, w - z);
    auto s = laurent_expand(f, 0, ExpansionPoint::at(Rat(0)), 3);
    CHECK(s.lo == 0);
    for (int k = 0; k <= 3; ++k) {
        CHECK(s.at(k) == rf(one, w.pow(k + 1)));
    }
}

TEST_CASE("truncated expansion matches the function") {
    MultiPoly z = zvar(0);
    MultiPoly one = MultiPoly::constant(1);
    RationalFunction f = rf(z.pow(3) + MultiPoly::constant(2), (z - MultiPoly::constant(3)) * (z + one));
    ExpansionPoint p = ExpansionPoint::at(Rat(2));
    int window = 6;
    auto s = laurent_expand(f, 0, p, window);
    REQUIRE(s.lo == 0);

    // Subtracting the truncated series from f leaves valuation > window.
    RationalFunction partial = f;
    MultiPoly shift = z - MultiPoly::constant(p.value);
    for (int k = s.lo; k <= window; ++k) {
        partial = partial - s.at(k) * RationalFunction::poly(shift.pow(k));
    }
    auto tail = laurent_expand(partial, 0, p, window);
    for (int k = tail.lo; k <= window; ++k) {
        CHECK(tail.at(k) == RationalFunction::constant(Rat(0)));
    }
}

TEST_CASE("residues at finite points and infinity") {
    MultiPoly z = zvar(0);
    MultiPoly one = MultiPoly::constant(1);

    CHECK(residue_at(rf(one, one - z * z), 0, ExpansionPoint::at(Rat(1))) ==
          RationalFunction::constant(Rat(-1, 2)));
    CHECK(residue_at(rf(one, z), 0, ExpansionPoint::at(Rat(0))) ==
          RationalFunction::constant(Rat(1)));
    CHECK(residue_at(RationalFunction::poly(z), 0, ExpansionPoint::at(Rat(0))) ==
          RationalFunction::constant(Rat(0)));
    // Residue at infinity of dz/z is -1.
    CHECK(residue_at(rf(one, z), 0, ExpansionPoint::infinity()) ==
          RationalFunction::constant(Rat(-1)));
}

TEST_CASE("residues of a differential sum to zero") {
    MultiPoly z = zvar(0);
    MultiPoly one = MultiPoly::constant(1);
    MultiPoly den = (z - one) * (z + MultiPoly::constant(2)) * z * z;
    RationalFunction f = rf(z.pow(5) + one, den);

    RationalFunction total =
        residue_at(f, 0, ExpansionPoint::at(Rat(1))) +
        residue_at(f, 0, ExpansionPoint::at(Rat(-2))) +
        residue_at(f, 0, ExpansionPoint::at(Rat(0))) +
        residue_at(f, 0, ExpansionPoint::infinity());
    CHECK(total == RationalFunction::constant(Rat(0)));
}

TEST_CASE("series coefficients at zero") {
    MultiPoly z = zvar(0);
    MultiPoly one = MultiPoly::constant(1);
    auto c = series_coefficients_at_zero(rf(one, (one - z * z).pow(2)), 0, 4);
    std::vector<Rat> expect = {Rat(1), Rat(0), Rat(2), Rat(0), Rat(3)};
    CHECK(c == expect);

    auto odd = series_coefficients_at_zero(rf(z, one - z * z), 0, 5);
    std::vector<Rat> expect_odd = {Rat(0), Rat(1), Rat(0), Rat(1), Rat(0), Rat(1)};
    CHECK(odd == expect_odd);

    CHECK_THROWS_AS(series_coefficients_at_zero(rf(one, z), 0, 2), std::invalid_argument);
}

TEST_CASE("involution pullback of differentials") {
    MultiPoly z = zvar(0);
    MultiPoly one = MultiPoly::constant(1);

    // dz/z is anti-invariant under z -> 1/z.
    RationalFunction f = rf(one, z);
    CHECK(involution_pullback(f, 0, Involution::Reciprocal) == -f);

    // z dz is invariant under z -> -z.
    RationalFunction g = RationalFunction::poly(z);
    CHECK(involution_pullback(g, 0, Involution::Negation) == g);

    // Pulling back 1/(1-z^2) along z -> 1/z gives -1/(z^2-1) again times
    // the usual jacobian; the product with (z^2-1) must be constant.
    RationalFunction h = rf(one, one - z * z);
    RationalFunction hp = involution_pullback(h, 0, Involution::Reciprocal);
    CHECK(hp * rf(z * z - one, one) == RationalFunction::constant(Rat(-1)));

    // Both pullbacks are involutions on differentials.
    for (const RationalFunction& probe :
         {rf(z.pow(3) + one, one - z * z), rf(one, z * (z - MultiPoly::constant(2)))}) {
        CHECK(involution_pullback(involution_pullback(probe, 0, Involution::Reciprocal), 0,
                                  Involution::Reciprocal) == probe);
        CHECK(involution_pullback(involution_pullback(probe, 0, Involution::Negation), 0,
                                  Involution::Negation) == probe);
    }
}

TEST_CASE("expansion coefficients of powers of a simple pole") {
    CHECK(expansion_coefficient(1, 1, 4) == Rat(2));
    CHECK(expansion_coefficient(0, 0, 2) == Rat(0));
    CHECK(expansion_coefficient(0, 0, 1) == Rat(1));
    CHECK(expansion_coefficient(2, 3, 7) == Rat(binomial_general(5, 3)));

    // Cross-check against the actual series of z^k/(1-z^2)^{m+1}: the
    // coefficient of z^{b-1} for b in [1, 40].  The function is the
    // polynomial continuation in b, which departs from the literal series
    // coefficient only for b <= k - 2m - 1, so that strip is skipped.
    MultiPoly z = zvar(0);
    MultiPoly one = MultiPoly::constant(1);
    for (int k = 0; k <= 6; ++k) {
        for (int m = 0; m <= 6; ++m) {
            RationalFunction f = rf(z.pow(k), (one - z * z).pow(m + 1));
            auto coeffs = series_coefficients_at_zero(f, 0, 39);
            for (long b = 1; b <= 40; ++b) {
                if (b <= k - 2 * m - 1) continue;
                CHECK(expansion_coefficient(k, m, b) == coeffs[static_cast<size_t>(b - 1)]);
            }
        }
    }
}

TEST_CASE("expansion coefficient reflection identity") {
    // p_{2m-k}(b) = (-1)^m p_k(-b) whenever both sides are defined.
    for (int k = 0; k <= 6; ++k) {
        for (int m = 0; m <= 6; ++m) {
            if (2 * m - k < 0) continue;
            for (long b = -20; b <= 20; ++b) {
                Rat lhs = expansion_coefficient(2 * m - k, m, b);
                Rat rhs = expansion_coefficient(k, m, -b);
                if (m % 2 == 1) rhs = -rhs;
                CHECK(lhs == rhs);
            }
        }
    }
}

TEST_CASE("factored fractions cancel linear factors") {
    MultiPoly z = zvar(0);
    MultiPoly one = MultiPoly::constant(1);

    // (1 - z^2)/(1 - z)^2 reduces to (1 + z)/(1 - z).
    Frac f = Frac(one - z * z).over(0, 2, 0);
    CHECK(f.num == one + z);
    CHECK(f.one_minus[0] == 1);
    CHECK(f.to_rational() == rf(one + z, one - z));

    // Addition over mixed denominators agrees with rational arithmetic.
    Frac a = Frac(one).over(0, 1, 0);          // 1/(1-z)
    Frac b = Frac(one).over(0, 0, 1);          // 1/(1+z)
    Frac sum = a + b;                          // 2/(1-z^2)
    CHECK(sum.to_rational() == rf(MultiPoly::constant(2), one - z * z));

    // Cancellation after addition: 1/(1-z) - 1/(1-z) = 0 with clean exponents.
    Frac zero = a - a;
    CHECK(zero.is_zero());
    CHECK(zero.one_minus[0] == 0);

    // Multiplication accumulates exponents and cancels.
    Frac c = Frac(one - z).over(0, 0, 2);      // (1-z)/(1+z)^2
    Frac prod = a * c;                         // 1/(1+z)^2
    CHECK(prod.num == one);
    CHECK(prod.one_minus[0] == 0);
    CHECK(prod.one_plus[0] == 2);

    // Bare-variable denominators behave the same way.
    Frac d = Frac(z * z + z).over(0, 0, 0, 1); // (z^2+z)/z = z + 1
    CHECK(d.num == z + one);
    CHECK(d.bare[0] == 0);

    // Multivariate: spectator variables ride along untouched.
    MultiPoly w = zvar(1);
    Frac m = Frac((one - z) * w).over(0, 1, 0).over(1, 0, 0, 1);  // w(1-z)/((1-z) w) = 1
    CHECK(m.num == one);
    CHECK(m.to_rational() == RationalFunction::constant(Rat(1)));
}

TEST_CASE("fraction arithmetic matches rational functions") {
    MultiPoly z = zvar(0);
    MultiPoly w = zvar(1);
    MultiPoly one = MultiPoly::constant(1);

    Frac a = Frac(z * w + one).over(0, 2, 1).over(1, 1, 0);
    Frac b = Frac(w - z).over(0, 0, 1, 1).over(1, 0, 2);
    RationalFunction ra = a.to_rational();
    RationalFunction rb = b.to_rational();

    CHECK((a + b).to_rational() == ra + rb);
    CHECK((a - b).to_rational() == ra - rb);
    CHECK((a * b).to_rational() == ra * rb);
    CHECK((-a).to_rational() == -ra);
    CHECK(a.scaled(Rat(3, 7)).to_rational() == ra * RationalFunction::constant(Rat(3, 7)));
}

TEST_CASE("scalar series arithmetic") {
    Series<Rat> a = series_zero<Rat>(-1, 2);
    a.set(-1, Rat(1));
    a.set(1, Rat(3));
    Series<Rat> b = series_zero<Rat>(0, 2);
    b.set(0, Rat(2));
    b.set(2, Rat(-1));

    Series<Rat> sum = series_add(a, b);
    CHECK(sum.at(-1) == Rat(1));
    CHECK(sum.at(0) == Rat(2));
    CHECK(sum.at(1) == Rat(3));
    CHECK(sum.at(2) == Rat(-1));

    Series<Rat> prod = series_mul(a, b, -1, 2);
    CHECK(prod.at(-1) == Rat(2));
    CHECK(prod.at(1) == Rat(5));
    CHECK(prod.at(2) == Rat(0));

    CHECK(series_conv_coeff<Rat>(a, b, 1) == Rat(5));
    CHECK(a.valuation() == -1);
}

TEST_CASE("series inverse and powers") {
    // 1/(1 - t) = 1 + t + t^2 + ...
    Series<Rat> s = series_zero<Rat>(0, 4);
    s.set(0, Rat(1));
    s.set(1, Rat(-1));
    Series<Rat> inv = series_inverse(s, 5);
    for (int k = 0; k <= 4; ++k) CHECK(inv.at(k) == Rat(1));

    // (1 + t)^{-2} = 1 - 2t + 3t^2 - ...
    Series<Rat> u = series_zero<Rat>(0, 3);
    u.set(0, Rat(1));
    u.set(1, Rat(1));
    Series<Rat> p = series_pow_int(u, -2, 0, 3);
    CHECK(p.at(0) == Rat(1));
    CHECK(p.at(1) == Rat(-2));
    CHECK(p.at(2) == Rat(3));
    CHECK(p.at(3) == Rat(-4));

    // A base with positive valuation: (t(1+t))^{-3} has valuation -3 and its
    // deep coefficients need the extra relative orders kept internally.
    Series<Rat> v = series_zero<Rat>(1, 2);
    v.set(1, Rat(1));
    v.set(2, Rat(1));
    Series<Rat> q = series_pow_int(v, -3, -3, 2);
    // (1+t)^{-3} = 1 - 3t + 6t^2 - 10t^3 + 15t^4 - 21t^5
    CHECK(q.at(-3) == Rat(1));
    CHECK(q.at(-2) == Rat(-3));
    CHECK(q.at(-1) == Rat(6));
    CHECK(q.at(0) == Rat(-10));
    CHECK(q.at(1) == Rat(15));
    CHECK(q.at(2) == Rat(-21));

    // Positive powers with positive valuation stay exact as well.
    Series<Rat> cube = series_pow(v, 3, 3, 6, Rat(1));
    CHECK(cube.at(3) == Rat(1));
    CHECK(cube.at(4) == Rat(3));
    CHECK(cube.at(5) == Rat(3));
    CHECK(cube.at(6) == Rat(1));

    // Shifted windows behave like multiplication by t^k.
    Series<Rat> sh = series_shift(u, -2);
    CHECK(sh.lo == -2);
    CHECK(sh.at(-2) == Rat(1));
    CHECK(sh.at(-1) == Rat(1));
}
