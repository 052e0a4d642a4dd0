#include "doctest.h"

#include <cmath>

#include "lts/analytic.hpp"
#include "lts/errors.hpp"
#include "lts/map_expr.hpp"

using namespace lts;

namespace {

const AsymptoticSpec kSpec{2, 1, 0, 0};
cd f_exp(cd z) { return 2.0 * z + std::exp(-z); }
cx_hp f_exp_hp(cx_hp z) { return cx_hp(2 * z + exp(-z)); }

} // namespace

TEST_SUITE("analytic-normalize") {

TEST_CASE("M and rho") {
    const double e = std::exp(1.0);
    CHECK(M_eps_k(e, 1, 1) == doctest::Approx(1.0));
    CHECK(rho(e, 2, 1, 1) == doctest::Approx(e - 1));
    CHECK(M_eps_k(4.0, 2, 0) == doctest::Approx(1.0 / 16));
    double prev = M_eps_k(1.0, 2, 0);
    for (double x = 1.5; x < 50; x += 0.5) {
        double m = M_eps_k(x, 2, 0);
        CHECK(m < prev);
        prev = m;
    }
    CHECK(exp_iter(2, 0.0) == doctest::Approx(e));
    CHECK_THROWS_AS(M_eps_k(1.0, 1, 1), Error);  // log 1 = 0 is exp^1(0)
    CHECK_THROWS_AS(M_eps_k(-1.0, 1, 0), Error);
}

TEST_CASE("boundary maps") {
    auto up = upper_map_check([](double x) { return x * x; }, nullptr, 1, 1, 50, kSpec);
    CHECK(up.criterion_ok);
    auto flat = upper_map_check([](double) { return 3.0; }, nullptr, 1, 1, 50, kSpec);
    CHECK(!flat.ok);
    CHECK(!flat.defining_ok);
    double t = 2;
    double s2 = std::cos(0.5 * std::atan(t));
    auto sq = upper_map_check([](double x) { return sqd_upper(x, 1.0); }, nullptr, std::sqrt(t) / s2,
                              sqd_boundary(t, 1).real(), 50, kSpec);
    CHECK(sq.ok);
    auto low = lower_map_check([](double x) { return -x * x; }, nullptr, 1, 1, 50, kSpec);
    CHECK(low.criterion_ok);
}

TEST_CASE("standard quadratic domain") {
    cd b0 = sqd_boundary(0, 1.5);
    CHECK(b0.real() == doctest::Approx(1.5));
    CHECK(b0.imag() == doctest::Approx(0.0));
    CHECK(sqd_membership({11.5, 0}, 1.5).status == Membership::member);
    CHECK(sqd_membership({-1, 0}, 1).status == Membership::not_member);
    // boundary parametrization agrees with the closed-form upper curve
    for (double r : {0.5, 2.0, 10.0}) {
        cd p = sqd_boundary(r, 1);
        CHECK(sqd_upper(p.real(), 1) == doctest::Approx(p.imag()));
        CHECK(sqd_membership(p + cd(0.05, 0), 1).status == Membership::member);
        CHECK(sqd_membership(p + cd(0, 0.05), 1).status == Membership::not_member);
    }
    auto dom = DomainSpec::standard_quadratic(1);
    CHECK(dom.contains({5, 1}));
    CHECK(!dom.contains({0.5, 0}));
}

TEST_CASE("invariant_threshold") {
    auto dom = DomainSpec::standard_quadratic(1);
    double R = invariant_threshold(f_exp, kSpec, dom);
    CHECK(R > 0);
    CHECK(R < 10);
    CHECK(rho_of(kSpec, R) > 0);
    double R2 = invariant_threshold([](cd z) { return 2.0 * z; }, kSpec, dom);
    CHECK(R2 > 0);
    try {
        invariant_threshold([](cd z) { return 3.0 * z; }, kSpec, dom);
        FAIL("3z certified as alpha = 2");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::certification);
    }
}

TEST_CASE("koenigs on 2z + e^-z") {
    auto dom = DomainSpec::standard_quadratic(1);
    double R = invariant_threshold(f_exp, kSpec, dom);
    auto k = koenigs_normalize(f_exp, kSpec, dom, R, 1e-13);
    auto pts = domain_samples(dom, R, {});
    CHECK(pts.size() == 100);
    for (auto& s : evaluate_grid(k, pts)) {
        CHECK(s.residual < 1e-10);
        CHECK(s.residual <= s.residual_bound);
        CHECK(s.tangent_ok);
        CHECK(std::abs(s.phi - s.zeta) <= 2 * M_of(kSpec, s.zeta.real()) + s.tail + 1e-12);
    }
    auto serial = evaluate_grid(k, pts, false);
    auto par = evaluate_grid(k, pts, true);
    for (std::size_t i = 0; i < pts.size(); ++i) CHECK(serial[i].phi == par[i].phi);
    CHECK(std::abs(k.evaluator(5.0) - 5.00338024751765) < 1e-12);
}

TEST_CASE("f = alpha zeta gives the identity") {
    auto dom = DomainSpec::standard_quadratic(1);
    CMap f = [](cd z) { return 2.0 * z; };
    double R = invariant_threshold(f, kSpec, dom);
    auto k = koenigs_normalize(f, kSpec, dom, R, 1e-12);
    for (cd z : {cd(3, 0), cd(4, 1), cd(10, -2)}) CHECK(k.evaluator(z) == z);
}

TEST_CASE("uniqueness surrogate: two tolerances agree within their tails") {
    auto dom = DomainSpec::standard_quadratic(1);
    double R = invariant_threshold(f_exp, kSpec, dom);
    auto a = koenigs_normalize(f_exp, kSpec, dom, R, 1e-6);
    auto b = koenigs_normalize(f_exp, kSpec, dom, R, 1e-13);
    for (cd z : domain_samples(dom, R, {10, 5, 1})) {
        double gap = std::abs(a.evaluator(z) - b.evaluator(z));
        CHECK(gap <= a.tail_bound(z) + b.tail_bound(z) + 1e-14);
        CHECK(a.iterations_used(z) <= b.iterations_used(z));
    }
}

TEST_CASE("extended precision path agrees with double") {
    auto dom = DomainSpec::standard_quadratic(1);
    double R = invariant_threshold(f_exp, kSpec, dom);
    auto k = koenigs_normalize(f_exp, kSpec, dom, R, 1e-13, f_exp_hp);
    REQUIRE(k.evaluator_hp);
    cx_hp v = k.evaluator_hp(cx_hp(5.0));
    CHECK(std::abs(v.real().convert_to<double>() - k.evaluator(5.0).real()) < 1e-13);
}

TEST_CASE("certified tail dominates the measured remainder") {
    auto M = [](double x) { return M_eps_k(x, 1, 0); };
    double t10 = certified_tail(kSpec, 3.0, 10, M);
    double t20 = certified_tail(kSpec, 3.0, 20, M);
    CHECK(t20 < t10);
    int N = tail_index(kSpec, 3.0, 1e-10, M);
    CHECK(certified_tail(kSpec, 3.0, N, M) < 1e-10);
    CHECK(certified_tail(kSpec, 3.0, N - 1, M) >= 1e-10);
}

TEST_CASE("homological equation") {
    auto dom = DomainSpec::standard_quadratic(1);
    CMap f = [](cd z) { return 2.0 * z; };
    CMap g = [](cd z) { return std::exp(-z); };
    double R = invariant_threshold(f, kSpec, dom);
    auto h = solve_homological(f, g, 1, kSpec, dom, R, 1e-16);
    double want = 0;
    for (int n = 0; n < 8; ++n) want -= std::pow(2.0, -(n + 1)) * std::exp(-std::pow(2.0, n) * 3);
    CHECK(std::abs(h.evaluator(3.0) - want) < 1e-16);
    for (auto& s : check_homological(h, f, g, 2, domain_samples(dom, R, {}))) {
        CHECK(s.residual < 1e-12);
        CHECK(s.scaled < 1.0);
    }
    auto zero = solve_homological(f, [](cd) { return cd(0); }, 1, kSpec, dom, R, 1e-16);
    CHECK(zero.evaluator({4, 1}) == cd(0));
    try {
        solve_homological(f, [](cd z) { return 5.0 * std::exp(-z); }, 1, kSpec, dom, R, 1e-16);
        FAIL("g-bound violation accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::precondition);
    }
}

TEST_CASE("real line invariance") {
    auto dom = DomainSpec::standard_quadratic(1);
    double R = invariant_threshold(f_exp, kSpec, dom);
    auto k = koenigs_normalize(f_exp, kSpec, dom, R, 1e-13);
    auto r = real_line_invariance_check(k, {R + 0.5, 5, 10, 20});
    CHECK(r.applicable);
    CHECK(r.passed);
    CMap fi = [](cd z) { return 2.0 * z + cd(0, 1) * std::exp(-z); };
    double Ri = invariant_threshold(fi, kSpec, dom);
    auto ki = koenigs_normalize(fi, kSpec, dom, Ri, 1e-13);
    CHECK(!real_line_invariance_check(ki, {Ri + 0.5, 5, 10}).applicable);
}

TEST_CASE("map expressions") {
    auto m = MapExpr::parse("2*zeta + exp(-zeta)");
    cd z(1.5, 0.3);
    CHECK(std::abs(m(z) - f_exp(z)) < 1e-15);
    auto p = MapExpr::parse("zeta^3 - 2.5e-1*i*z + sqrt(z)/log(z)");
    CHECK(std::abs(p(z) - (z * z * z - 0.25 * cd(0, 1) * z + std::sqrt(z) / std::log(z))) < 1e-13);
    cx_hp hv = m(cx_hp(2.0));
    CHECK(std::abs(hv.real().convert_to<double>() - (4 + std::exp(-2.0))) < 1e-15);
    CHECK_THROWS_AS(MapExpr::parse("2*zeta +"), Error);
}

}
