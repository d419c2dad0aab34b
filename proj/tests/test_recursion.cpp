#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "eo/recursion.hpp"

using namespace eo;

namespace {

MultiPoly zv(int v, unsigned e = 1) { return MultiPoly::variable(v, e); }

CurveSpec curve_y_z() {
    CurveSpec s;
    s.a = 0;
    s.b = 1;
    s.y = YData::rational(RationalFunction::poly(zv(0)));
    return s;
}

// Multivariate Taylor coefficient of prod z_i^{exps[i]} at the origin.
Rat taylor_coeff(RationalFunction f, const std::vector<unsigned>& exps) {
    for (std::size_t i = 0; i < exps.size(); ++i) {
        auto s = laurent_expand(f, static_cast<int>(i), ExpansionPoint::at(Rat(0)),
                                static_cast<int>(exps[i]));
        f = s.at(static_cast<int>(exps[i]));
    }
    return rf_constant(f);
}

RationalFunction rf_inv(const RationalFunction& f) { return RationalFunction(Rat(1)) / f; }

// The kernel of the curve y = z at a fixed first argument, as a function of
// the flowing variable (index 0).
RationalFunction numeric_kernel(const Rat& c0) {
    MultiPoly z = zv(0);
    MultiPoly one = MultiPoly::constant(Rat(1));
    RationalFunction zr = RationalFunction::poly(z);
    RationalFunction izr = RationalFunction::make(one, z);
    RationalFunction c0r(c0);
    RationalFunction bracket = rf_inv(c0r - zr) - rf_inv(c0r - izr);
    RationalFunction ydel = zr - izr;
    RationalFunction xp = RationalFunction::make(z * z - one, z * z);
    return -bracket / ((ydel * xp) * RationalFunction(Rat(2)));
}

Rat residue_value(const RationalFunction& f, const ExpansionPoint& pt) {
    return rf_constant(residue_at(f, 0, pt));
}

}  // namespace

TEST_CASE("unstable invariants match their closed forms") {
    MultiDifferential w1 = omega_unstable(curve_y_z(), 0, 1);
    MultiPoly z = zv(0);
    MultiPoly one = MultiPoly::constant(Rat(1));
    CHECK(w1.n == 1);
    CHECK(w1.value == RationalFunction::make(z * z - one, z));

    MultiDifferential w2 = omega_unstable(curve_y_z(), 0, 2);
    CHECK(w2.n == 2);
    CHECK(w2.value.eval({Rat(3), Rat(2)}) == Rat(1));

    // Pulling the second argument through the involution gives -1/(z0 z1 - 1)^2.
    RationalFunction pulled = involution_pullback(w2.value, 1, Involution::Reciprocal);
    MultiPoly prod = zv(0) * zv(1) - one;
    CHECK(pulled == RationalFunction::make(MultiPoly::constant(Rat(-1)), prod * prod));
    CHECK(pulled.eval({Rat(3), Rat(2)}) == Rat(-1) / 25);

    CHECK_THROWS_AS(omega_unstable(curve_y_z(), 1, 1), std::invalid_argument);
}

TEST_CASE("three-point invariant of y = z") {
    Engine e(curve_y_z());
    const StableForm& f = e.stable(0, 3);
    CHECK(f.d == 0);
    CHECK(f.p == 2);
    MultiPoly one = MultiPoly::constant(Rat(1));
    MultiPoly prod_p = one;
    MultiPoly prod_m = one;
    for (int v = 0; v < 3; ++v) {
        prod_p = prod_p * (one + zv(v)) * (one + zv(v));
        prod_m = prod_m * (one - zv(v)) * (one - zv(v));
    }
    CHECK(f.num == (prod_p - prod_m).scaled(Rat(1, 2)));
}

TEST_CASE("one-loop one-point invariant of y = z") {
    Engine e(curve_y_z());
    const StableForm& f = e.stable(1, 1);
    CHECK(f.d == 1);
    CHECK(f.p == 4);
    CHECK(f.num == zv(0, 3));

    MultiPoly z = zv(0);
    MultiPoly one = MultiPoly::constant(Rat(1));
    MultiPoly den = (one - z * z).pow(4);
    RationalFunction v = stable_to_rational(f);
    CHECK(v == RationalFunction::make(zv(0, 3), den));
}

TEST_CASE("expansion coefficients at the origin match the stated values") {
    Engine e(curve_y_z());
    RationalFunction v03 = stable_to_rational(e.stable(0, 3));
    CHECK(taylor_coeff(v03, {1, 1, 1}) == Rat(8));
    CHECK(taylor_coeff(v03, {0, 0, 0}) == Rat(0));
    RationalFunction v11 = stable_to_rational(e.stable(1, 1));
    CHECK(taylor_coeff(v11, {3}) == Rat(1));
    CHECK(taylor_coeff(v11, {5}) == Rat(4));
}

TEST_CASE("kernel residues at the branch points reproduce the recursion output") {
    Engine e(curve_y_z());
    MultiPoly one = MultiPoly::constant(Rat(1));
    Rat c0(4), c1(5), c2(7);

    // (0,3): the integrand is K times the two split terms.
    RationalFunction K = numeric_kernel(c0);
    RationalFunction z = RationalFunction::poly(zv(0));
    auto w02_at = [&](const Rat& c) {
        RationalFunction d = z - RationalFunction(c);
        return rf_inv(d * d);
    };
    auto w02_hat_at = [&](const Rat& c) {
        RationalFunction d = RationalFunction(Rat(1)) - z * RationalFunction(c);
        return -rf_inv(d * d);
    };
    RationalFunction B = w02_at(c1) * w02_hat_at(c2) + w02_at(c2) * w02_hat_at(c1);
    RationalFunction f = K * B;
    Rat res_branch = residue_value(f, ExpansionPoint::at(Rat(1))) +
                     residue_value(f, ExpansionPoint::at(Rat(-1)));
    RationalFunction v03 = stable_to_rational(e.stable(0, 3));
    CHECK(res_branch == v03.eval({c0, c1, c2}));

    // All residues of the rational differential sum to zero.
    Rat total = res_branch + residue_value(f, ExpansionPoint::infinity());
    std::vector<Rat> finite = {Rat(0), c0, Rat(1) / c0, c1, Rat(1) / c1, c2, Rat(1) / c2};
    for (const Rat& p : finite) total += residue_value(f, ExpansionPoint::at(p));
    CHECK(total == Rat(0));

    // (1,1): the integrand is K times omega^0_2 on the diagonal pair.
    MultiPoly zz = zv(0) * zv(0);
    RationalFunction pair = -rf_inv(RationalFunction::poly((one - zz) * (one - zz)));
    RationalFunction f11 = K * pair;
    Rat res11 = residue_value(f11, ExpansionPoint::at(Rat(1))) +
                residue_value(f11, ExpansionPoint::at(Rat(-1)));
    RationalFunction v11 = stable_to_rational(e.stable(1, 1));
    CHECK(res11 == v11.eval({c0}));
    Rat total11 = res11 + residue_value(f11, ExpansionPoint::infinity());
    std::vector<Rat> finite11 = {Rat(0), c0, Rat(1) / c0};
    for (const Rat& p : finite11) total11 += residue_value(f11, ExpansionPoint::at(p));
    CHECK(total11 == Rat(0));
}

TEST_CASE("two-point genus-one integrand matches the memoized result") {
    Engine e(curve_y_z());
    Rat c0(4), c1(5);
    MultiPoly one = MultiPoly::constant(Rat(1));
    RationalFunction z = RationalFunction::poly(zv(0));

    RationalFunction v03 = stable_to_rational(e.stable(0, 3));
    RationalFunction v11 = stable_to_rational(e.stable(1, 1));

    // omega^0_3(z, 1/z, c1) with the jacobian of the involution, collapsed to
    // one variable.
    RationalFunction g = v03.eval_var(2, c1);
    RationalFunction pull = involution_pullback(g, 1, Involution::Reciprocal);
    RationalFunction t1 = RationalFunction::make(pull.num.subst_var(1, zv(0)),
                                                pull.den.subst_var(1, zv(0)));

    RationalFunction d02 = z - RationalFunction(c1);
    RationalFunction w02 = rf_inv(d02 * d02);
    RationalFunction dh = RationalFunction(Rat(1)) - z * RationalFunction(c1);
    RationalFunction w02h = -rf_inv(dh * dh);
    RationalFunction v11_hat = involution_pullback(v11, 0, Involution::Reciprocal);

    RationalFunction B = t1 + w02 * v11_hat + v11 * w02h;
    RationalFunction f = numeric_kernel(c0) * B;
    Rat res = residue_value(f, ExpansionPoint::at(Rat(1))) +
              residue_value(f, ExpansionPoint::at(Rat(-1)));
    RationalFunction v12 = stable_to_rational(e.stable(1, 2));
    CHECK(res == v12.eval({c0, c1}));
}

TEST_CASE("canonical invariants hold for the deeper y = z forms") {
    Engine e(curve_y_z());
    for (auto [g, n] : {std::pair{0, 4}, {1, 2}, {2, 1}, {0, 5}, {1, 3}, {2, 2}}) {
        const StableForm& f = e.stable(g, n);
        CHECK(f.p == 2 * (3 * g - 3 + n) + 2);
        CHECK_FALSE(f.num.is_zero());
    }
    // Permutation symmetry, re-checked here on a transposition.
    const StableForm& f04 = e.stable(0, 4);
    std::array<int, kMaxVars> swap{};
    for (int i = 0; i < kMaxVars; ++i) swap[i] = i;
    swap[1] = 3;
    swap[3] = 1;
    CHECK(f04.num.rename_vars(swap) == f04.num);
}

TEST_CASE("canonicalize_stable round trips and rejects structural defects") {
    Engine e(curve_y_z());
    MultiDifferential w = e.omega(0, 3);
    StableForm f = canonicalize_stable(w, 0, 3);
    CHECK(f.num == e.stable(0, 3).num);

    MultiPoly z = zv(0);
    MultiPoly one = MultiPoly::constant(Rat(1));
    // A pole at the origin is outside the allowed locus.
    MultiDifferential bad0{1, RationalFunction::make(one, z * (one - z * z).pow(4))};
    CHECK_THROWS_AS(canonicalize_stable(bad0, 1, 1), std::runtime_error);
    // Pole order beyond 2d+2.
    MultiDifferential bad1{1, RationalFunction::make(one, (one - z * z).pow(5))};
    CHECK_THROWS_AS(canonicalize_stable(bad1, 1, 1), std::runtime_error);
    // Numerator violating the involution antisymmetry.
    MultiDifferential bad2{1, RationalFunction::make(z * z * z + z, (one - z * z).pow(4))};
    CHECK_THROWS_AS(canonicalize_stable(bad2, 1, 1), std::runtime_error);
}

TEST_CASE("airy invariants match the intersection-number values") {
    const StableForm& f11 = compute_omega_airy_form(1, 1);
    CHECK(f11.airy);
    CHECK(f11.p == 4);
    CHECK(f11.num == MultiPoly::constant(Rat(1, 16)));

    const StableForm& f03 = compute_omega_airy_form(0, 3);
    CHECK(f03.num == MultiPoly::constant(Rat(1, 2)));

    const StableForm& f04 = compute_omega_airy_form(0, 4);
    MultiPoly expect04;
    for (int i = 0; i < 4; ++i) {
        MultiPoly term = MultiPoly::constant(Rat(3, 4));
        for (int j = 0; j < 4; ++j)
            if (j != i) term = term * zv(j, 2);
        expect04 += term;
    }
    CHECK(f04.num == expect04);

    // One full recursion depth further: the genus-two one-point value.
    const StableForm& f21 = compute_omega_airy_form(2, 1);
    CHECK(f21.num == MultiPoly::constant(Rat(105, 1024)));

    MultiDifferential w11 = compute_omega_airy(1, 1);
    CHECK(w11.value == RationalFunction::make(MultiPoly::constant(Rat(1, 16)), zv(0, 4)));
}

TEST_CASE("airy forms carry only even exponents") {
    const StableForm& f12 = compute_omega_airy_form(1, 2);
    CHECK(f12.d == 2);
    for (int v = 0; v < 2; ++v) {
        CHECK(f12.num.degree_in(v) <= 4);
        for (int e = 1; e <= 4; e += 2) CHECK(f12.num.coeff_of(v, static_cast<unsigned>(e)).is_zero());
    }
}

TEST_CASE("disk cache round trips, recovers from corruption, and is deterministic") {
    namespace fs = std::filesystem;
    fs::path dir = "recursion-cache-test";
    fs::remove_all(dir);
    fs::create_directories(dir);

    CurveSpec c = curve_y_z();
    Engine e1(c, dir.string());
    const StableForm& f = e1.stable(2, 1);
    fs::path entry = dir / (e1.fingerprint() + "-g2-n1.json");
    REQUIRE(fs::exists(entry));
    std::string first;
    {
        std::stringstream buf;
        buf << std::ifstream(entry).rdbuf();
        first = buf.str();
    }

    // A second engine reads the entry back bit-for-bit.
    Engine e2(c, dir.string());
    CHECK(stable_to_json(e2.stable(2, 1)) == stable_to_json(f));

    // Corrupted entries are ignored and recomputed.
    std::ofstream(entry) << "{not json";
    Engine e3(c, dir.string());
    CHECK(e3.stable(2, 1).num == f.num);

    // The rewritten file matches the original bytes.
    std::string second;
    {
        std::stringstream buf;
        buf << std::ifstream(entry).rdbuf();
        second = buf.str();
    }
    CHECK(first == second);

    StableForm parsed = stable_from_json(first);
    CHECK(parsed.g == 2);
    CHECK(parsed.n == 1);
    CHECK(parsed.num == f.num);
    CHECK_THROWS_AS(stable_from_json("[1,2]"), std::invalid_argument);

    fs::remove_all(dir);
}

TEST_CASE("jet depth requirements are enforced and sufficient depth is exact") {
    // A jet curve agreeing with y = z to low order only.
    CurveSpec shallow;
    shallow.a = 0;
    shallow.b = 1;
    shallow.y = YData::jets({Rat(0), Rat(0), Rat(0)}, {Rat(1), Rat(0), Rat(0)});
    Engine e(shallow);
    // (0,3) needs no jets beyond index 1 and must agree with the rational model.
    Engine ez(curve_y_z());
    CHECK(e.stable(0, 3).num == ez.stable(0, 3).num);
    // (1,2) first materializes (1,1), whose kernel window [-2, 0] already
    // reads the jets through index 3.
    try {
        e.stable(1, 2);
        FAIL("expected a jet depth error");
    } catch (const std::exception& ex) {
        CHECK(std::string(ex.what()).find("need 3") != std::string::npos);
    }
}

TEST_CASE("engine argument validation") {
    Engine e(curve_y_z());
    CHECK_THROWS_AS(e.stable(0, 2), std::invalid_argument);
    CHECK_THROWS_AS(e.stable(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(compute_omega(curve_y_z(), -1, 1), std::invalid_argument);

    CurveSpec bad = curve_y_z();
    bad.b = 0;
    CHECK_THROWS_AS(compute_omega(bad, 0, 3), std::invalid_argument);
}
