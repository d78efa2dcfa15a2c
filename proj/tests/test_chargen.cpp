#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "common.hpp"

using namespace extcalc;
using testutil::load_module;
using testutil::modules_isomorphic;

namespace {

AlgebraPtr a1() { return subalgebra(AlgebraKind::A, 1); }

Poly mono(const PolyCohomology& r, std::initializer_list<int> expo)
{
    Expo e(expo);
    return r.monomial_poly(e);
}

Poly random_homogeneous(const PolyCohomology& r, int d, std::mt19937& rng)
{
    Poly p;
    for (const auto& e : r.monomials(d))
        if (rng() & 1)
            p.toggle(e);
    return p;
}

// Index of the named generator at the given degree of a module.
int named(const ModulePresentation& m, int t, const std::string& name)
{
    const auto& ns = m.names(t);
    for (std::size_t i = 0; i < ns.size(); ++i)
        if (ns[i] == name)
            return static_cast<int>(i);
    return -1;
}

// Check that op applied to `src` equals the sum of the named targets.
void check_action(const ModulePresentation& m, int g, int t, const std::string& src,
                  const std::vector<std::string>& targets)
{
    int dg = m.algebra()->generators()[static_cast<std::size_t>(g)].degree;
    int j = named(m, t, src);
    REQUIRE(j >= 0);
    F2Vector got = m.act(g, t).col(static_cast<std::size_t>(j));
    F2Vector want(static_cast<std::size_t>(m.dim(t + dg)));
    for (const auto& name : targets) {
        int i = named(m, t + dg, name);
        REQUIRE(i >= 0);
        want.flip(static_cast<std::size_t>(i));
    }
    INFO("sq" << dg << " " << src << " at degree " << t);
    CHECK(got == want);
}

}  // namespace

TEST_CASE("Sq1 on the degree-one polynomial generator squares it")
{
    auto bo1 = bo_cohomology(1, 10);
    CHECK(bo1.sq_k(1, mono(bo1, {1})) == mono(bo1, {2}));
}

TEST_CASE("Sq^n(w1^m) has the binomial coefficient")
{
    auto bo1 = bo_cohomology(1, 42);
    for (int m = 0; m <= 20; ++m)
        for (int n = 0; n <= 20; ++n) {
            Poly x = mono(bo1, {m});
            Poly want;
            if (binom2(m, n))
                want = mono(bo1, {m + n});
            CHECK(bo1.sq_k(n, x) == want);
        }
}

TEST_CASE("the complex line ring has no Sq1 and squares under Sq2")
{
    auto bu1 = bu1_cohomology(12);
    CHECK(bu1.sq_k(1, mono(bu1, {1})).is_zero());
    CHECK(bu1.sq_k(2, mono(bu1, {1})) == mono(bu1, {2}));
    for (int k = 1; k <= 5; ++k) {
        CHECK(bu1.sq_k(1, mono(bu1, {k})).is_zero());
        Poly want;
        if (k % 2 == 1)
            want = mono(bu1, {k + 1});
        CHECK(bu1.sq_k(2, mono(bu1, {k})) == want);
    }
}

TEST_CASE("Wu formula values in the rank-3 ring")
{
    auto bo3 = bo_cohomology(3, 12);
    CHECK(wu_sq(1, 1, 3) == mono(bo3, {2, 0, 0}));
    CHECK(wu_sq(1, 2, 3) == mono(bo3, {1, 1, 0}) + mono(bo3, {0, 0, 1}));
    CHECK(wu_sq(1, 3, 3) == mono(bo3, {1, 0, 1}));
    CHECK(wu_sq(2, 2, 3) == mono(bo3, {0, 2, 0}));
    CHECK(wu_sq(2, 3, 3) == mono(bo3, {0, 1, 1}));
    CHECK(wu_sq(2, 1, 3).is_zero());
    for (int j = 1; j <= 3; ++j) {
        Expo e(3, 0);
        e[static_cast<std::size_t>(j - 1)] = 1;
        CHECK(wu_sq(0, j, 3) == bo3.monomial_poly(e));
    }
}

TEST_CASE("power series inversion of the total class")
{
    auto bo3 = bo_cohomology(3, 12);
    auto sw = universal_sw(bo3, 3);
    auto inv = invert_total_class(bo3, sw, 12);
    CHECK(inv.at(1) == mono(bo3, {1, 0, 0}));
    CHECK(inv.at(2) == mono(bo3, {2, 0, 0}) + mono(bo3, {0, 1, 0}));
    CHECK(inv.at(3) == mono(bo3, {0, 0, 1}) + mono(bo3, {3, 0, 0}));
    for (int d = 1; d <= 12; ++d) {
        Poly acc;
        for (int k = 0; k <= d; ++k)
            acc += bo3.multiply(sw.at(k), inv.at(d - k));
        INFO("degree " << d);
        CHECK(acc.is_zero());
    }

    auto bo1 = bo_cohomology(1, 6);
    SWData triv;
    triv.bundle_dim = 0;
    triv.w.assign(7, Poly());
    triv.w[0].terms.insert(bo1.one());
    auto ti = invert_total_class(bo1, triv, 6);
    CHECK(ti.at(0) == triv.w[0]);
    for (int d = 1; d <= 6; ++d)
        CHECK(ti.at(d).is_zero());
}

TEST_CASE("Cartan formula on random rank-3 elements")
{
    auto bo3 = bo_cohomology(3, 18);
    std::mt19937 rng(123);
    for (int trial = 0; trial < 30; ++trial) {
        int da = 1 + static_cast<int>(rng() % 8);
        int db = 1 + static_cast<int>(rng() % 8);
        Poly x = random_homogeneous(bo3, da, rng);
        Poly y = random_homogeneous(bo3, db, rng);
        int k = static_cast<int>(rng() % 5);
        Poly lhs = bo3.sq_k(k, bo3.multiply(x, y));
        Poly rhs;
        for (int i = 0; i <= k; ++i)
            rhs += bo3.multiply(bo3.sq_k(i, x), bo3.sq_k(k - i, y));
        CHECK(lhs == rhs);
    }
}

TEST_CASE("unstable bounds on monomials")
{
    auto bo3 = bo_cohomology(3, 21);
    for (int d = 1; d <= 10; ++d) {
        for (const auto& e : bo3.monomials(d)) {
            Poly x = bo3.monomial_poly(e);
            CHECK(bo3.sq_k(d, x) == bo3.multiply(x, x));
            for (int k = d + 1; k <= d + 3; ++k)
                CHECK(bo3.sq_k(k, x).is_zero());
        }
    }
}

TEST_CASE("Thom module relations for the line bundle")
{
    auto ring = bo_cohomology(1, 9);
    auto tm = thom_module(ring, universal_sw(ring, 1), 1, a1(), "MO(1)");
    const auto& m = tm.exported;
    for (int k = 0; k <= 7; ++k) {
        std::string src = k == 0 ? "1U" : (k == 1 ? "w1U" : "w1^" + std::to_string(k) + "U");
        std::string dst = k == 0 ? "w1U" : "w1^" + std::to_string(k + 1) + "U";
        check_action(m, 0, 1 + k, src, k % 2 == 0 ? std::vector<std::string>{dst} : std::vector<std::string>{});
    }
}

TEST_CASE("Thom module relations over the rank-3 base")
{
    auto ring = bo_cohomology(3, 10);
    auto tm = thom_module(ring, universal_sw(ring, 3), 3, a1(), "MO(3)");
    const auto& m = tm.exported;
    check_action(m, 0, 3, "1U", {"w1U"});
    check_action(m, 0, 4, "w1U", {});
    check_action(m, 0, 5, "w2U", {"w3U"});
    check_action(m, 0, 6, "w3U", {});
    check_action(m, 1, 3, "1U", {"w2U"});
    check_action(m, 1, 4, "w1U", {"w1^3U", "w1w2U"});
    check_action(m, 1, 5, "w2U", {"w1^2w2U", "w1w3U"});
    check_action(m, 1, 6, "w3U", {"w1^2w3U"});
}

TEST_CASE("Thom module relations for the virtual rank-3 bundle")
{
    auto ring = bo_cohomology(3, 10);
    auto sw = invert_total_class(ring, universal_sw(ring, 3), 10);
    auto tm = thom_module(ring, sw, -3, a1(), "MTO(3)");
    const auto& m = tm.exported;
    check_action(m, 0, -3, "1U", {"w1U"});
    check_action(m, 0, -2, "w1U", {});
    check_action(m, 0, -1, "w2U", {"w3U"});
    check_action(m, 0, 0, "w3U", {});
    check_action(m, 1, -3, "1U", {"w1^2U", "w2U"});
    check_action(m, 1, -2, "w1U", {"w1w2U"});
    check_action(m, 1, -1, "w2U", {"w1w3U"});
    check_action(m, 1, 0, "w3U", {});
    for (int i = 1; i <= 2; ++i) {
        F2Vector img = m.act(i - 1, -3).col(0);
        F2Vector want(static_cast<std::size_t>(m.dim(-3 + i)));
        for (const auto& e : sw.at(i).terms)
            want.set(static_cast<std::size_t>(ring.index_of(e)));
        CHECK(img == want);
    }
}

TEST_CASE("Thom module relations for the oriented rank-3 bundle")
{
    auto ring = bso_cohomology(3, 10);
    auto tm = thom_module(ring, universal_sw(ring, 3), 3, a1(), "MSO(3)");
    const auto& m = tm.exported;
    check_action(m, 0, 3, "1U", {});
    check_action(m, 0, 5, "w2U", {"w3U"});
    check_action(m, 0, 6, "w3U", {});
    check_action(m, 1, 3, "1U", {"w2U"});
    check_action(m, 1, 5, "w2U", {});
    check_action(m, 1, 6, "w3U", {});
}

TEST_CASE("smash product dimensions are the Cauchy product")
{
    auto mu1r = bu1_cohomology(9);
    auto mu1 = thom_module(mu1r, universal_sw(mu1r, 2), 2, a1(), "MU(1)");
    auto mo1r = bo_cohomology(1, 9);
    auto mo1 = thom_module(mo1r, universal_sw(mo1r, 1), 1, a1(), "MO(1)");
    auto sm = smash(mu1, mo1);
    for (int t = sm.t_min(); t <= std::min(sm.t_max(), 11); ++t) {
        int expect = 0;
        for (int ta = mu1.exported.t_min(); ta <= mu1.exported.t_max(); ++ta)
            expect += mu1.exported.dim(ta) * mo1.exported.dim(t - ta);
        CHECK(sm.dim(t) == expect);
    }
    CHECK(sm.dim(3) == 1);
    CHECK(sm.dim(4) == 1);
    CHECK(sm.act(0, 3).get(0, 0));  // Sq1(U(x)U) = U(x)w1U
}

TEST_CASE("smashing with the zero-dimensional point is the identity")
{
    auto pointr = PolyCohomology({}, 8, {});
    SWData psw;
    psw.bundle_dim = 0;
    psw.w.assign(9, Poly());
    psw.w[0].terms.insert(pointr.one());
    auto point = thom_module(pointr, psw, 0, a1(), "S0");
    CHECK(point.exported.total_dim() == 1);
    auto mo1r = bo_cohomology(1, 8);
    auto mo1 = thom_module(mo1r, universal_sw(mo1r, 1), 1, a1(), "MO(1)");
    auto sm = smash(mo1, point);
    CHECK(modules_isomorphic(sm, mo1.exported, 1, 9));
}

TEST_CASE("catalog labels, bottoms and validation")
{
    CHECK(catalog_entries().size() == 10);
    for (const auto& [label, desc] : catalog_entries()) {
        auto m = catalog(label, 12);
        INFO(label << " = " << desc);
        CHECK(m.t_max() == 12);
        CHECK(m.bottom_degree() == 0);
        CHECK(m.dim(0) == 1);
        CHECK(m.validate().ok);
        CHECK(m.label() == label);
    }
    CHECK_THROWS(catalog("nosuch"));
    auto s0 = catalog("mspin", 12);
    CHECK(s0.total_dim() == 1);
}

TEST_CASE("catalog modules match the figure decompositions in low degrees")
{
    auto A1 = a1();
    auto reg = regular_module(A1);
    auto cone = load_module("modules/cone_eta.mod");

    auto check_decomp = [&](const std::string& label, const ModulePresentation& sum, int hi) {
        auto got = catalog(label, 14).truncate(hi);
        auto want = sum.truncate(hi);
        INFO(label << " in degrees <= " << hi);
        for (int t = 0; t <= hi; ++t) {
            INFO("degree " << t);
            CHECK(got.dim(t) == want.dim(t));
        }
        CHECK(modules_isomorphic(got, want, 0, hi));
    };

    check_decomp("g+",
                 direct_sum(direct_sum(load_module("modules/r3.mod"), reg.suspend(2)),
                            direct_sum(reg.suspend(4), reg.suspend(5))),
                 5);
    check_decomp("g-",
                 direct_sum(direct_sum(reg, load_module("modules/r0.mod").suspend(2)),
                            direct_sum(direct_sum(reg.suspend(4), reg.suspend(4)),
                                       load_module("modules/r5.mod").suspend(5))),
                 5);
    check_decomp("g0",
                 direct_sum(load_module("modules/question.mod"), load_module("modules/r2.mod").suspend(4)), 5);
    check_decomp("spinc", direct_sum(cone, cone.suspend(4)), 5);
    check_decomp("pinc",
                 direct_sum(load_module("modules/r6.mod"), load_module("modules/r6.mod").suspend(4)), 5);
}

TEST_CASE("the desuspended line-bundle Thom spectrum matches its figure column")
{
    std::string text =
        "algebra A(1)\nrange 0 7\n"
        "gen u0 0\ngen u1 1\ngen u2 2\ngen u3 3\ngen u4 4\ngen u5 5\ngen u6 6\ngen u7 7\n"
        "sq1 u0 = u1\nsq1 u2 = u3\nsq1 u4 = u5\nsq1 u6 = u7\n"
        "sq2 u1 = u3\nsq2 u2 = u4\nsq2 u5 = u7\n";
    auto typed = parse_cell_diagram(text, "fig-mo1");
    auto got = catalog("pin-", 12).truncate(7);
    CHECK(modules_isomorphic(got, typed, 0, 7));
}

TEST_CASE("hand-typed rank-3 base edges hold as polynomial identities")
{
    auto bo3 = bo_cohomology(3, 12);
    auto P = [&](std::initializer_list<std::initializer_list<int>> monos) {
        Poly p;
        for (auto e : monos)
            p.toggle(Expo(e));
        return p;
    };
    Poly w1 = P({{1, 0, 0}}), w2 = P({{0, 1, 0}}), w3 = P({{0, 0, 1}});
    Poly x = P({{1, 1, 0}, {0, 0, 1}});      // the Sq1-image of the degree-2 variable
    Poly wbar2 = P({{2, 0, 0}, {0, 1, 0}});
    auto mul = [&](const Poly& a, const Poly& b) { return bo3.multiply(a, b); };

    struct Edge {
        int k;
        Poly src, dst;
    };
    std::vector<Edge> edges = {
        {1, w1, mul(w1, w1)},
        {1, P({{3, 0, 0}}), P({{4, 0, 0}})},
        {1, P({{5, 0, 0}}), P({{6, 0, 0}})},
        {2, P({{2, 0, 0}}), P({{4, 0, 0}})},
        {2, P({{3, 0, 0}}), P({{5, 0, 0}})},
        {1, w2, x},
        {2, w2, mul(w2, w2)},
        {2, x, mul(x, wbar2)},
        {1, mul(x, wbar2), mul(x, x)},
        {2, mul(w2, w2), mul(x, x)},
        {1, w3, mul(w1, w3)},
        {2, w3, mul(w2, w3)},
        {2, mul(w1, w3), mul(mul(w1, w3), wbar2)},
        {1, mul(w2, w3), mul(w3, w3)},
        {2, mul(w2, w3), mul(mul(w1, w3), x)},
        {1, mul(mul(w1, w3), wbar2), mul(mul(w1, w3), x)},
        {1, mul(w1, mul(w1, w2)), mul(w1, mul(w1, x))},
        {2, mul(w1, mul(w1, w2)), mul(mul(w1, w1), mul(w2, wbar2))},
        {1, mul(mul(w1, w1), mul(w2, wbar2)), mul(mul(w1, w1), mul(mul(w1, w1), x))},
        {2, mul(w1, mul(w1, x)), mul(mul(w1, w1), mul(w2, x))},
    };
    for (const auto& e : edges) {
        INFO("edge under Sq" << e.k);
        CHECK(bo3.sq_k(e.k, e.src) == e.dst);
    }
    CHECK(bo3.sq_k(1, P({{4, 0, 0}})).is_zero());
    CHECK(bo3.sq_k(1, mul(w1, w3)).is_zero());
    CHECK(bo3.sq_k(1, mul(w2, w2)).is_zero());
    CHECK(bo3.sq_k(1, mul(x, x)).is_zero());
    CHECK(bo3.sq_k(1, mul(w3, w3)).is_zero());
}
