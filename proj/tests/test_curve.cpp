#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "eo/curve.hpp"
#include "eo/series.hpp"

using namespace eo;

namespace {

MultiPoly zp() { return MultiPoly::variable(0); }

CurveSpec basic(const Rat& a, const Rat& b, RationalFunction y) {
    CurveSpec s;
    s.a = a;
    s.b = b;
    s.y = YData::rational(std::move(y));
    return s;
}

ParamBinding bind(std::initializer_list<std::pair<std::string, Rat>> kv) {
    ParamBinding b;
    for (const auto& [k, v] : kv) b.values[k] = v;
    return b;
}

// Orders 0..upto of y - approx at z = point must vanish.
void check_match_order(const RationalFunction& y, const RationalFunction& approx,
                       const Rat& point, int upto) {
    RationalFunction diff = y - approx;
    auto s = laurent_expand(diff, 0, ExpansionPoint::at(point), upto);
    for (int k = s.lo; k <= upto; ++k) {
        INFO("order ", k, " at z=", rat_str(point));
        CHECK(s.at(k) == RationalFunction::constant(Rat(0)));
    }
}

} // namespace

TEST_CASE("validate accepts the basic curves and reports derivatives") {
    CurveDiag d = validate_curve(basic(0, 1, RationalFunction::poly(zp())));
    CHECK(d.ok);
    CHECK(d.y_prime_plus == Rat(1));
    CHECK(d.y_prime_minus == Rat(1));
    CHECK(d.x_second_plus == Rat(2));
    CHECK(d.x_second_minus == Rat(-2));

    CurveDiag d2 = validate_curve(basic(0, 1, RationalFunction::poly(zp().pow(2).scaled(Rat(1, 2)))));
    CHECK(d2.ok);
    CHECK(d2.y_prime_plus == Rat(1));
    CHECK(d2.y_prime_minus == Rat(-1));
}

TEST_CASE("validate rejects stationary and singular data") {
    MultiPoly one = MultiPoly::constant(1);
    // (1-z)^2 is stationary at z = 1 and only there.
    MultiPoly stationary = (one - zp()) * (one - zp());
    CurveDiag d = validate_curve(basic(0, 1, RationalFunction::poly(stationary)));
    CHECK_FALSE(d.ok);
    CHECK(std::count(d.errors.begin(), d.errors.end(), "y'(1)=0") == 1);
    CHECK(std::count(d.errors.begin(), d.errors.end(), "y'(-1)=0") == 0);

    CurveDiag db = validate_curve(basic(0, 0, RationalFunction::poly(zp())));
    CHECK_FALSE(db.ok);
    CHECK(db.errors.front() == "b=0");

    CurveDiag dp = validate_curve(basic(0, 1, RationalFunction::make(one, zp() - one)));
    CHECK_FALSE(dp.ok);
    CHECK(std::count(dp.errors.begin(), dp.errors.end(), "y pole at z=1") == 1);
}

TEST_CASE("jets of a curve already in basis form") {
    YData j = jets_from_rational(RationalFunction::poly(zp()), 4);
    REQUIRE(j.ak.size() == 5);
    REQUIRE(j.bk.size() == 5);
    for (const Rat& a : j.ak) CHECK(a == Rat(0));
    CHECK(j.bk[0] == Rat(1));
    for (std::size_t k = 1; k < j.bk.size(); ++k) CHECK(j.bk[k] == Rat(0));
}

TEST_CASE("jets of an odd cubic reconstruct it exactly") {
    RationalFunction y = RationalFunction::poly(zp().pow(3).scaled(Rat(1, 3)));
    YData j = jets_from_rational(y, 3);
    CHECK(partial_sum_y(j, 3) == y);
    // The polynomial lives in jet indices 0 and 1 only.
    CHECK(j.bk[0] == Rat(1, 3) * Rat(1) - Rat(0));
    CHECK(j.ak[0] == Rat(0));
}

TEST_CASE("jets match a rational y to the requested order") {
    RationalFunction y = RationalFunction::make(
        MultiPoly::constant(Rat(1, 3)),
        MultiPoly::constant(Rat(1, 3)) - zp().scaled(Rat(2, 3)));
    YData j = jets_from_rational(y, 2);
    RationalFunction approx = partial_sum_y(j, 2);
    check_match_order(y, approx, Rat(1), 2);
    check_match_order(y, approx, Rat(-1), 2);
}

TEST_CASE("jets of catalog rational curves match to every order up to 8") {
    std::vector<CurveSpec> curves = {
        catalog_instantiate("monomial", bind({{"m", Rat(2)}})),
        catalog_instantiate("monomial", bind({{"m", Rat(3)}})),
        catalog_instantiate("discrete-surfaces", bind({{"u", Rat(2)}})),
        catalog_instantiate("quadrangulations", bind({{"gamma", Rat(1)}, {"t4", Rat(1, 12)}})),
    };
    for (const CurveSpec& c : curves) {
        for (int N = 0; N <= 8; N += 4) {
            YData j = jets_from_rational(c.y.y, N);
            RationalFunction approx = partial_sum_y(j, N);
            check_match_order(c.y.y, approx, Rat(1), N);
            check_match_order(c.y.y, approx, Rat(-1), N);
        }
    }
}

TEST_CASE("jets reject a pole at a branch point") {
    MultiPoly one = MultiPoly::constant(1);
    CHECK_THROWS_AS(jets_from_rational(RationalFunction::make(one, one - zp()), 2),
                    std::invalid_argument);
}

TEST_CASE("partial sums of stored jet data") {
    std::vector<Rat> ak = {Rat(0), Rat(-1, 2), Rat(-1, 4)};
    std::vector<Rat> bk = {Rat(0)};
    YData ln_jets = YData::jets(ak, bk);
    MultiPoly one = MultiPoly::constant(1);
    MultiPoly u = one - zp() * zp();
    RationalFunction expect =
        RationalFunction::poly(u.scaled(Rat(-1, 2)) + (u * u).scaled(Rat(-1, 4)));
    CHECK(partial_sum_y(ln_jets, 2) == expect);

    CHECK(partial_sum_y(YData::jets({Rat(0)}, {Rat(0)}), 0) ==
          RationalFunction::constant(Rat(0)));
    CHECK(partial_sum_y(YData::jets({}, {Rat(1)}), 0) == RationalFunction::poly(zp()));

    CHECK_THROWS_WITH_AS(partial_sum_y(ln_jets, 5),
                         "partial_sum_y: jet lists end at index 2, need 5",
                         std::invalid_argument);
}

TEST_CASE("kernel scalar probe and branch point pole order") {
    CurveSpec c = basic(0, 1, RationalFunction::poly(zp()));
    Kernel k = kernel(c, 0);
    CHECK(k.eval_scalar(Rat(3), Rat(2)) == Rat(-4, 15));

    // 1/(2 (ybar(z)-ybar(1/z)) x'(z)) has a double pole at each branch point.
    RationalFunction core = RationalFunction::constant(Rat(1)) /
                            (k.ydel * k.xprime * RationalFunction::constant(Rat(2)));
    auto sp = laurent_expand(core, 0, ExpansionPoint::at(Rat(1)), 0);
    CHECK(sp.lo == -2);
    auto sm = laurent_expand(core, 0, ExpansionPoint::at(Rat(-1)), 0);
    CHECK(sm.lo == -2);

    CHECK_THROWS_AS(kernel(basic(0, 0, RationalFunction::poly(zp())), 0), std::invalid_argument);
}

TEST_CASE("kernel depth accounting for jet data") {
    CurveSpec c = catalog_instantiate("ln", {});
    Kernel k = kernel(c, 6);
    CHECK(k.ybar.is_poly());
    CHECK(k.ybar.num.degree_in(0) <= 13);
    CHECK_THROWS_AS(kernel(c, 29), std::invalid_argument);
}

TEST_CASE("monomial preset") {
    CurveSpec c = catalog_instantiate("monomial", bind({{"m", Rat(1)}}));
    CHECK(c.a == Rat(0));
    CHECK(c.b == Rat(1));
    CHECK(c.y.is_rational);
    CHECK(c.y.y == RationalFunction::poly(zp()));
    CHECK_THROWS_AS(catalog_instantiate("monomial", bind({{"m", Rat(0)}})), std::invalid_argument);
    CHECK_THROWS_AS(catalog_instantiate("monomial", bind({{"m", Rat(1, 2)}})), std::invalid_argument);
    CHECK_THROWS_AS(catalog_instantiate("monomial", {}), std::invalid_argument);
}

TEST_CASE("ln family presets") {
    CurveSpec c = catalog_instantiate("ln+cz", bind({{"c", Rat(2)}}));
    CurveDiag d = validate_curve(c);
    CHECK(d.ok);
    CHECK(d.y_prime_plus == Rat(3));
    CHECK(d.y_prime_minus == Rat(1));

    // c = 1 makes y'(-1) vanish.
    CurveDiag bad = validate_curve(catalog_instantiate("ln+cz", bind({{"c", Rat(1)}})));
    CHECK_FALSE(bad.ok);
    CHECK(bad.errors.front() == "y'(-1)=0");

    CurveDiag dl = validate_curve(catalog_instantiate("ln", {}));
    CHECK(dl.ok);
    CHECK(dl.y_prime_plus == Rat(1));
    CHECK(dl.y_prime_minus == Rat(-1));
}

TEST_CASE("discrete surfaces preset sits on the conic") {
    CurveSpec c = catalog_instantiate("discrete-surfaces", bind({{"u", Rat(2)}}));
    Rat t(1, 3), g(2, 3);
    CHECK(c.a == Rat(-2) * t);
    CHECK(c.b == g);
    CHECK(g * g == t * (t + 1));
    CHECK(c.y.y.eval(std::vector<Rat>{Rat(0)}) == Rat(1));
    CHECK(validate_curve(c).ok);

    for (const Rat& u : {Rat(0), Rat(1), Rat(-1)})
        CHECK_THROWS_AS(catalog_instantiate("discrete-surfaces", bind({{"u", u}})),
                        std::invalid_argument);
}

TEST_CASE("quadrangulations preset derives t and checks the branch") {
    CurveSpec c = catalog_instantiate("quadrangulations", bind({{"gamma", Rat(1)}, {"t4", Rat(1, 12)}}));
    // t = gamma^2 - 3 t4 gamma^4.
    MultiPoly expect = zp().scaled(Rat(3, 4)) - zp().pow(3).scaled(Rat(1, 12));
    CHECK(c.y.y == RationalFunction::poly(expect));
    // gamma scales y only; x stays z + 1/z.
    CHECK(c.a == Rat(0));
    CHECK(c.b == Rat(1));
    CurveDiag d = validate_curve(c);
    CHECK(d.ok);
    CHECK(d.y_prime_plus == Rat(1, 2));

    CurveSpec c2 = catalog_instantiate("quadrangulations", bind({{"gamma", Rat(2)}, {"t4", Rat(1, 96)}}));
    CHECK(validate_curve(c2).y_prime_plus == Rat(3));

    // The boundary binding instantiates (t = 1/2) but the curve is stationary
    // at z = 1 and validation rejects it.
    CurveSpec edge = catalog_instantiate("quadrangulations", bind({{"gamma", Rat(1)}, {"t4", Rat(1, 6)}}));
    CHECK(edge.y.y.eval(std::vector<Rat>{Rat(1)}) == Rat(1, 2) - Rat(1, 6));
    CurveDiag de = validate_curve(edge);
    CHECK_FALSE(de.ok);
    CHECK(de.errors.front() == "y'(1)=0");

    CHECK_THROWS_AS(catalog_instantiate("quadrangulations", bind({{"gamma", Rat(2)}, {"t4", Rat(1, 6)}})),
                    std::invalid_argument);
    CHECK_THROWS_AS(catalog_instantiate("quadrangulations", bind({{"gamma", Rat(0)}, {"t4", Rat(1, 12)}})),
                    std::invalid_argument);
}

TEST_CASE("q-deformed preset x rewrite and branch derivatives") {
    for (const Rat& z0 : {Rat(2), Rat(3)}) {
        CurveSpec c = catalog_instantiate("q-deformed", bind({{"z0", z0}}));
        CHECK(c.a == Rat(1) + 1 / (z0 * z0));
        CHECK(c.b == Rat(-1) / z0);

        // (1 - z/z0)(1 - 1/(z z0)) == a + b(z + 1/z) identically.
        MultiPoly z = zp();
        MultiPoly one = MultiPoly::constant(1);
        RationalFunction lhs = RationalFunction::make(
            (one - z.scaled(1 / z0)) * (z - MultiPoly::constant(1 / z0)), z);
        RationalFunction rhs = RationalFunction::make(
            z.scaled(c.a) + (z * z + one).scaled(c.b), z);
        CHECK(lhs == rhs);

        CurveDiag d = validate_curve(c);
        CHECK(d.ok);
        CHECK(d.y_prime_plus == -z0 * z0 * z0 / rat_pow(z0 - 1, 3));
        CHECK(d.y_prime_minus == z0 * z0 * z0 / rat_pow(z0 + 1, 3));
        CHECK(c.y.jet_depth() >= 16);
        CHECK(c.y.ak[0] == Rat(0));
    }
    for (const Rat& z0 : {Rat(0), Rat(1), Rat(-1)})
        CHECK_THROWS_AS(catalog_instantiate("q-deformed", bind({{"z0", z0}})), std::invalid_argument);
    CHECK_THROWS_AS(catalog_instantiate("plancherel", {}), std::invalid_argument);
}

TEST_CASE("curve JSON round trip") {
    CurveSpec c = catalog_instantiate("monomial", bind({{"m", Rat(2)}}));
    CurveSpec back = curve_from_json(curve_to_json(c));
    CHECK(back.a == c.a);
    CHECK(back.b == c.b);
    CHECK(back.y.is_rational);
    CHECK(back.y.y == c.y.y);
    CHECK(back.label == c.label);

    CurveSpec j = catalog_instantiate("ln+cz", bind({{"c", Rat(3)}}));
    CurveSpec jback = curve_from_json(curve_to_json(j));
    CHECK_FALSE(jback.y.is_rational);
    CHECK(jback.y.ak == j.y.ak);
    CHECK(jback.y.bk == j.y.bk);

    CHECK_THROWS_AS(curve_from_json("not json"), std::invalid_argument);
    CHECK_THROWS_AS(curve_from_json("{\"a\":\"1\"}"), std::exception);
}

TEST_CASE("fingerprints track mathematical content only") {
    CurveSpec a1 = catalog_instantiate("monomial", bind({{"m", Rat(1)}}));
    CurveSpec a2 = catalog_instantiate("monomial", bind({{"m", Rat(1)}}));
    CurveSpec b = catalog_instantiate("monomial", bind({{"m", Rat(2)}}));
    CHECK(curve_fingerprint(a1) == curve_fingerprint(a2));
    CHECK(curve_fingerprint(a1) != curve_fingerprint(b));

    CurveSpec relabeled = a1;
    relabeled.label = "renamed";
    CHECK(curve_fingerprint(relabeled) == curve_fingerprint(a1));
    CHECK(curve_fingerprint(a1).size() == 16);
}
