#include "doctest.h"
#include "test_util.hpp"

#include <algorithm>
#include <cmath>

#include "lts/dulac.hpp"
#include "lts/errors.hpp"

using namespace lts;

namespace {

DulacSeriesZ z2_minus_z3logz() {
    DulacSeriesZ d;
    d.alpha = Q(2);
    d.ladder.push_back({Q(3), {Coeff(0), Coeff(1)}});  // z^3 (-log z)
    return d;
}

// z^2 e^{-z} through z^(2+n)
DulacSeriesZ z2_exp(int n) {
    DulacSeriesZ d;
    d.alpha = Q(2);
    mpq_class f = 1;
    for (int i = 1; i <= n; ++i) {
        f /= i;
        d.ladder.push_back({Q(2 + i), {Coeff(i % 2 ? mpq_class(-f) : f)}});
    }
    return d;
}

} // namespace

TEST_SUITE("dulac-bridge") {

TEST_CASE("to_zeta_chart examples") {
    DulacSeriesZ a;
    a.alpha = Q(2);
    auto za = to_zeta_chart(a, Q(4));
    CHECK(za.alpha == Q(2));
    CHECK(za.c0.is_zero());
    CHECK(za.ladder.empty());

    // -log(1 + zeta e^-zeta) = -zeta e^-zeta + zeta^2/2 e^-2zeta - zeta^3/3 e^-3zeta
    auto zb = to_zeta_chart(z2_minus_z3logz(), Q(4));
    REQUIRE(zb.ladder.size() == 3);
    for (int j = 1; j <= 3; ++j) {
        CHECK(zb.ladder[j - 1].beta == Q(j));
        REQUIRE(zb.ladder[j - 1].poly.size() == std::size_t(j + 1));
        CHECK(zb.ladder[j - 1].poly[j] == Coeff::rat(j % 2 ? -1 : 1, j));
    }

    DulacSeriesZ e;
    e.alpha = Q(2);
    e.mode = Mode::floating;
    e.lambda = Coeff::from_float(std::exp(1.0));
    auto ze = to_zeta_chart(e, Q(4));
    CHECK(std::abs(ze.c0.value() + 1.0) < 1e-15);
}

TEST_CASE("chart round trips") {
    auto b = z2_minus_z3logz();
    CHECK(to_z_chart(to_zeta_chart(b, Q(4)), Q(4)) == b);
    DulacSeriesZ h;
    h.alpha = Q(2);
    h.lambda = Coeff(2);
    h.ladder.push_back({Q(3), {Coeff(1)}});
    auto zh = to_zeta_chart(h, Q(4));
    CHECK(zh.c0 == -Coeff::log_rational(2));
    CHECK(to_z_chart(zh, Q(4)) == h);
    auto e = z2_exp(6);
    e.cut = Q(9);
    auto ze = to_zeta_chart(e, Q(10));
    CHECK(ze.cut == Q(7));  // z^9 is unknown, so e^{-7 zeta} is
    auto back = to_z_chart(ze, Q(10));
    CHECK(back == e);
}

TEST_CASE("truncated ladders do not invent coefficients") {
    auto e = z2_exp(4);  // exact through z^6, unknown from z^7 on
    e.cut = Q(7);
    auto ze = to_zeta_chart(e, Q(10));
    for (auto& r : ze.ladder) CHECK(r.beta < Q(5));
}

TEST_CASE("JSON round trip") {
    DulacSeriesZ h;
    h.alpha = Q(2);
    h.lambda = Coeff(2);
    h.ladder.push_back({Q(5, 2), {Coeff(1), Coeff::rat(-1, 3)}});
    auto zh = to_zeta_chart(h, Q(3));
    CHECK(dulac_zeta_from_json(to_json(zh)) == zh);
    CHECK(dulac_z_from_json(to_json(h)) == h);
}

TEST_CASE("is_dulac") {
    auto g = test::grid(8, 8, 2);
    CHECK(is_dulac(parse_series("z^2+z^3*l1^-1", g)));
    CHECK(!is_dulac(parse_series("z^2+z^2*l1", g)));
    CHECK(!is_dulac(parse_series("z^2+z^3*l2^-1", g)));
    CHECK_THROWS_AS(from_transseries(parse_series("z^2+z^2*l1", g)), Error);
}

TEST_CASE("transseries embedding") {
    auto g = test::grid(8, 8, 1);
    auto b = z2_minus_z3logz();
    auto t = to_transseries(b, g);
    CHECK(test::agree(t, parse_series("z^2 + z^3*l1^-1", g)));
    CHECK(from_transseries(t) == b);
}

TEST_CASE("dulac_normalize_formal") {
    auto g = test::grid(8, 8, 1);
    DulacSeriesZ d;
    d.alpha = Q(2);
    d.ladder.push_back({Q(3), {Coeff(1)}});
    auto n = dulac_normalize_formal(d, g);
    REQUIRE(n.ladder.size() >= 2);
    CHECK(n.alpha == Q(1));
    CHECK(n.ladder[0].alpha == Q(2));
    CHECK(n.ladder[0].P[0] == Coeff::rat(1, 2));
    CHECK(n.ladder[1].P[0] == Coeff::rat(1, 8));

    DulacSeriesZ p;
    p.alpha = Q(2);
    CHECK(dulac_normalize_formal(p, g).ladder.empty());

    auto nb = dulac_normalize_formal(z2_minus_z3logz(), g);
    CHECK(is_dulac(to_transseries(nb, g)));
    CHECK(nb.is_real());
    bool has_log = false;
    for (auto& r : nb.ladder) has_log = has_log || r.P.size() > 1;
    CHECK(has_log);

    DulacSeriesZ bad;
    bad.alpha = Q(1, 2);
    CHECK_THROWS_AS(dulac_normalize_formal(bad, g), Error);
}

TEST_CASE("z^2 e^-z matches the degree-by-degree oracle") {
    auto g = test::grid(9, 8, 1);
    auto n = dulac_normalize_formal(z2_exp(8), g);
    // phi = z - z^2/2 - z^3/8 + 17/48 z^4 - 143/384 z^5 + 1439/3840 z^6 - 8849/46080 z^7
    const mpq_class want[] = {mpq_class(-1, 2), mpq_class(-1, 8), mpq_class(17, 48), mpq_class(-143, 384),
                              mpq_class(1439, 3840), mpq_class(-8849, 46080)};
    REQUIRE(n.ladder.size() >= 6);
    for (int i = 0; i < 6; ++i) {
        CHECK(n.ladder[i].alpha == Q(2 + i));
        CHECK(n.ladder[i].P[0] == Coeff(want[i]));
    }
}

TEST_CASE("partial normalizations") {
    auto phi = to_zeta_chart(dulac_normalize_formal(z2_exp(6), test::grid(7, 8, 1)), Q(5));
    REQUIRE(phi.ladder.size() >= 2);
    auto p0 = partial_normalizations(phi, 0);
    CHECK(p0.ladder.empty());
    CHECK(p0.alpha == Q(1));
    auto p1 = partial_normalizations(phi, 1);
    REQUIRE(p1.ladder.size() == 1);
    CHECK(p1.ladder[0].beta == phi.ladder[0].beta);
    CHECK_THROWS_AS(partial_normalizations(phi, int(phi.ladder.size()) + 1), Error);
    cd z(3, 0.5);
    cd want = z;
    for (int i = 0; i < 2; ++i) {
        cd q = 0, zp = 1;
        for (auto& c : phi.ladder[i].poly) {
            q += c.value() * zp;
            zp *= z;
        }
        want += q * std::exp(-phi.ladder[i].beta.to_double() * z);
    }
    CHECK(std::abs(evaluate(partial_normalizations(phi, 2), z) - want) < 1e-15);
}

TEST_CASE("assess_decay") {
    std::vector<double> x, y, flat;
    for (int i = 0; i < 40; ++i) {
        x.push_back(i * 0.5);
        y.push_back(std::exp(-0.5 * i * 0.5));
        flat.push_back(1.0);
    }
    auto d = assess_decay(x, y);
    CHECK(d.decays);
    CHECK(d.eps_hat == doctest::Approx(0.5));
    CHECK(!assess_decay(x, flat).decays);
    auto z = assess_decay(x, std::vector<double>(40, 0.0));
    CHECK(z.identically_zero);
    CHECK(z.decays);
}

TEST_CASE("defect decay") {
    RaySpec ray;
    DulacSeriesZeta id;
    id.alpha = Q(1);
    auto zero = defect_decay_check([](cd z) { return 2.0 * z; }, 2, id, Q(0), ray);
    CHECK(zero.identically_zero);
    auto d0 = defect_decay_check([](cd z) { return 2.0 * z + std::exp(-z); }, 2, id, Q(0), ray);
    CHECK(d0.decays);
    CHECK(d0.eps_hat == doctest::Approx(1.0).epsilon(0.01));
}

}
