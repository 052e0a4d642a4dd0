#include "doctest.h"
#include "test_util.hpp"

#include "lts/errors.hpp"

using namespace lts;
using lts::test::key;

TEST_SUITE("cli") {

TEST_CASE("parse examples") {
    auto g = test::grid(6, 4, 2);
    auto a = parse_series("z^2 + z^3*l1", g);
    CHECK(supp(a) == std::vector<ExponentKey>{key(Q(2)), key(Q(3), 1)});
    auto b = parse_series("z^2 - z^3*l1^-1", g);
    CHECK(b.coeff(key(Q(3), -1)) == Coeff(-1));
    CHECK(supp(parse_series("z^(1/2)", g)) == std::vector<ExponentKey>{key(Q(1, 2))});
    auto c = parse_series("(1/2+3i)*z", g);
    CHECK(c.coeff(key(Q(1))) == Coeff(mpq_class(1, 2), mpq_class(3)));
    auto l = parse_series("z^2 - z^3*log(z)", g);
    CHECK(l.coeff(key(Q(3), -1)) == Coeff(1));
}

TEST_CASE("print and parse round trip") {
    auto g = test::grid(6, 5, 3);
    for (const char* s : {"z^2 + z^3*l1", "z^2 - z^3*l1^-1*l2^2 + 7/3*z^(9/2)", "(1/2-3i)*z + 2*log(3)*z^2*l3",
                          "-z^(1/3)", "z^-1 + 4"}) {
        auto f = parse_series(s, g);
        auto once = f.str();
        auto again = parse_series(once, g).str();
        CHECK(once == again);
    }
}

TEST_CASE("canonical printing is lex ascending") {
    auto g = test::grid(6, 5, 2);
    CHECK(parse_series("z^3 + z^2*l1 + z^2", g).str() == "z^2 + z^2*l1 + z^3");
    CHECK(parse_series("1/2*z - 1/3*z^2", g).str() == "1/2*z - 1/3*z^2");
}

TEST_CASE("parse errors") {
    auto g = test::grid(6, 4, 1);
    auto kind = [&](const char* s) {
        try {
            parse_series(s, g);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::internal;
    };
    CHECK(kind("z^2 +") == ErrorKind::parse);
    CHECK(kind("z^2 + l1^(1/2)") == ErrorKind::parse);
    CHECK(kind("z^2 + l3") == ErrorKind::depth_overflow);
    try {
        parse_series("z^2 + $", g);
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("column") != std::string::npos);
    }
}

}
