#include "doctest.h"
#include "test_util.hpp"

#include "lts/errors.hpp"

using namespace lts;
using lts::test::agree;
using lts::test::key;

TEST_SUITE("series-core") {

TEST_CASE("exponent keys order lexicographically") {
    CHECK(key(Q(1), 5) < key(Q(2), -3));
    CHECK(key(Q(2), -1) < key(Q(2), 0));
    CHECK(key(Q(2), 0, 3) < key(Q(2), 1, -4));
    CHECK(key(Q(1), 1) + key(Q(1, 2), -1) == key(Q(3, 2), 0));
}

TEST_CASE("add") {
    auto g = test::grid(6, 4, 2);
    auto P = [&](const char* s) { return parse_series(s, g); };
    auto r = P("z+z^2") + P("-z^2");
    CHECK(r.term_count() == 1);
    CHECK(r.coeff(key(Q(1))) == Coeff(1));
    CHECK(agree(P("z^2*l1") + P("z^2*l1"), P("2*z^2*l1")));
    auto f = P("z^2 + 3*z^3*l1^-1");
    CHECK(agree(f + TransSeries::zero(g), f));
}

TEST_CASE("mul") {
    auto g = test::grid(6, 4, 2);
    auto P = [&](const char* s) { return parse_series(s, g); };
    CHECK(agree(P("z") * P("z"), P("z^2")));
    auto m = P("z*l1") * P("z*l1^-1");
    CHECK(m.term_count() == 1);
    CHECK(m.coeff(key(Q(2))) == Coeff(1));
    CHECK(agree(P("z+z^2") * P("z+z^2"), P("z^2+2*z^3+z^4")));
    CHECK(agree(pow_int(P("z+z^2"), 2), P("z^2+2*z^3+z^4")));
}

TEST_CASE("d_dz") {
    auto g = test::grid(6, 4, 2);
    auto P = [&](const char* s) { return parse_series(s, g); };
    CHECK(agree(d_dz(P("z^2")), P("2*z")));
    auto dl = d_dz(P("l1"));
    CHECK(dl.term_count() == 1);
    CHECK(dl.coeff(key(Q(-1), 2)) == Coeff(1));
    CHECK(agree(d_dz(P("z*l1")), P("l1 + l1^2")));
    // d l2/dz = z^-1 l1 l2^2
    CHECK(d_dz(P("l2")).coeff(key(Q(-1), 1, 2)) == Coeff(1));
}

TEST_CASE("D_m on blocks") {
    auto g = test::grid(6, 8, 2);
    auto P = [&](const char* s) { return parse_series(s, g); };
    auto d1 = D_m(Block::from_series(P("l1")), 1).to_series(g);
    CHECK(agree(d1, P("l1^2")));
    CHECK(D_m(Block::from_series(P("3")), 1).is_zero());
    auto d2 = D_m(Block::from_series(P("l1^2*l2")), 1).to_series(g);
    CHECK(agree(d2, P("2*l1^3*l2")));
}

TEST_CASE("orders and leading data") {
    auto g = test::grid(6, 4, 2);
    auto P = [&](const char* s) { return parse_series(s, g); };
    CHECK(*ord_z(P("z^2+z^3*l1")) == Q(2));
    CHECK(*ord(P("z^2*l1^-1+z^2")) == key(Q(2), -1));
    CHECK(agree(leading_block(P("z^2+z^2*l1+z^3")), P("z^2+z^2*l1")));
    CHECK(leading_block(P("z^2+z^2*l1+z^3")).term_count() == 2);
    auto [k, c] = leading_term(P("5*z^3 + z^4"));
    CHECK(k == key(Q(3)));
    CHECK(c == Coeff(5));
    CHECK(supp_z(P("z + z*l1 + z^(5/2)")) == std::vector<Q>{Q(1), Q(5, 2)});
    CHECK(!ord(TransSeries::zero(g)));
    CHECK_THROWS_AS(leading_term(TransSeries::zero(g)), Error);
}

TEST_CASE("distances") {
    auto g = test::grid(6, 8, 2);
    auto P = [&](const char* s) { return parse_series(s, g); };
    CHECK(dist_z(P("z+z^2"), P("z")).value == 0.25);
    auto f = P("z+z^3*l1");
    CHECK(dist_z(f, f).value == 0);
    auto dm = dist_m(Block::from_series(P("l1")), Block::from_series(P("l1+l1^3")), 1);
    CHECK(dm.value == 0.125);
}

TEST_CASE("weak_delta trajectories") {
    auto g = test::grid(6, 4, 1);
    auto f = parse_series("z + z^2*l1", g);
    auto t = weak_delta({f, f, f}, key(Q(2), 1));
    REQUIRE(t.size() == 3);
    CHECK(t[0] == Coeff(1));
    CHECK(t[2] == Coeff(1));
    for (auto& c : weak_delta({f, f}, key(Q(7, 2), 3))) CHECK(c.is_zero());
}

TEST_CASE("truncation keeps stored coefficients exact") {
    auto g = test::grid(4, 3, 1);
    auto x = inv(parse_series("1 - l1", g));  // 1 + l1 + l1^2 + ... cut at block_cap
    CHECK(x.term_count() == 3);
    CHECK(!x.is_exact_at(key(Q(0), 3)));
    CHECK(x.is_exact_at(key(Q(0), 2)));
    for (auto& [k, c] : x.term_list()) CHECK(c == Coeff(1));
}

TEST_CASE("power sums and logarithms") {
    auto g = test::grid(5, 4, 2);
    auto P = [&](const char* s) { return parse_series(s, g); };
    CHECK(agree(pow_q(P("z^2+z^3"), Q(1, 2)), P("z + 1/2*z^2 - 1/8*z^3 + 1/16*z^4")));
    CHECK(agree(inv(P("z+z^2")), P("z^-1 - 1 + z - z^2 + z^3 - z^4")));
    CHECK(agree(log_series(P("z")), P("-l1^-1")));
    CHECK(agree(exp_series(P("z")), P("1 + z + 1/2*z^2 + 1/6*z^3 + 1/24*z^4")));
    CHECK(binom(mpq_class(1, 2), 3) == mpq_class(1, 16));
}

TEST_CASE("float mode") {
    auto g = test::grid(5, 4, 1);
    auto f = parse_series("z^2 + 0.5*z^3", g);
    CHECK(f.mode() == Mode::floating);
    CHECK(f.coeff(key(Q(3))).value().real() == 0.5);
    auto e = parse_series("z^2 + 1/2*z^3", g).to_float();
    CHECK(agree(e, f));
}

TEST_CASE("numeric evaluation matches the expression") {
    auto g = test::grid(6, 4, 1);
    auto f = parse_series("z^2 + 3*z^3*l1", g);
    std::complex<double> z = 0.01;
    double l1 = -1.0 / std::log(0.01);
    CHECK(std::abs(evaluate(f, z) - (1e-4 + 3e-6 * l1)) < 1e-18);
}

TEST_CASE("JSON round trip") {
    auto g = test::grid(6, 5, 2);
    auto f = parse_series("z^2 - z^3*l1^-1*l2 + (1/2+3i)*z^(5/2) + 2*log(3)*z^4", g);
    auto back = series_from_json(to_json(f));
    CHECK(back.str() == f.str());
    CHECK(agree(back, f));
    CHECK(back.grid().z_cap == g.z_cap);
}

}
