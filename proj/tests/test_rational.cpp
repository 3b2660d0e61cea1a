#include "doctest.h"

#include "rmdf/rational.hpp"

using namespace rmdf;

TEST_CASE("[rational] canonical form") {
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(-2, 4) == Rational(-1, 2));
    CHECK(Rational(2, -4) == Rational(-1, 2));
    CHECK(Rational(0, 7) == Rational(0));
    CHECK(Rational(6, 3).num() == 2);
    CHECK(Rational(6, 3).den() == 1);

    // Rational(p, q) == Rational(kp, kq) for nonzero k
    std::int64_t ps[] = {-7, -1, 0, 1, 3, 10};
    std::int64_t qs[] = {1, 2, 5, 12};
    std::int64_t ks[] = {-3, -1, 2, 7};
    for (auto p : ps)
        for (auto q : qs)
            for (auto k : ks)
                CHECK(Rational(p, q) == Rational(k * p, k * q));
}

TEST_CASE("[rational] arithmetic is exact") {
    CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
    CHECK(Rational(2, 3) - Rational(1, 6) == Rational(1, 2));
    CHECK(Rational(2, 3) * Rational(3, 4) == Rational(1, 2));
    CHECK(Rational(2, 3) / Rational(4, 3) == Rational(1, 2));
    CHECK(Rational(1, 3) + Rational(2, 3) == Rational(1));
    CHECK_THROWS_AS(Rational(1, 2) / Rational(0), rational_error);
    CHECK_THROWS_AS(Rational(1, 0), rational_error);
}

TEST_CASE("[rational] floor and ceil") {
    CHECK(Rational(7, 3).floor() == 2);
    CHECK(Rational(7, 3).ceil() == 3);
    CHECK(Rational(-7, 3).floor() == -3);
    CHECK(Rational(-7, 3).ceil() == -2);
    CHECK(Rational(6, 3).floor() == 2);
    CHECK(Rational(6, 3).ceil() == 2);
    CHECK(Rational(0).floor() == 0);
    CHECK(Rational(-1, 2).frac() == Rational(1, 2));
    CHECK(Rational(5, 2).frac() == Rational(1, 2));
}

TEST_CASE("[rational] ordering") {
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK(Rational(-1, 2) < Rational(-1, 3));
    CHECK(Rational(2, 4) <= Rational(1, 2));
    CHECK(Rational(3, 2) > Rational(1));
}

TEST_CASE("[rational] parse and print") {
    CHECK(Rational::parse("2/3") == Rational(2, 3));
    CHECK(Rational::parse("-2/3") == Rational(-2, 3));
    CHECK(Rational::parse("4/6") == Rational(2, 3));
    CHECK(Rational::parse("7") == Rational(7));
    CHECK(Rational::parse("0") == Rational(0));
    CHECK(Rational(2, 3).str() == "2/3");
    CHECK(Rational(-2, 3).str() == "-2/3");
    CHECK(Rational(7).str() == "7");

    CHECK_THROWS_AS(Rational::parse("2/0"), rational_error);
    CHECK_THROWS_AS(Rational::parse(""), rational_error);
    CHECK_THROWS_AS(Rational::parse("1.5"), rational_error);
    CHECK_THROWS_AS(Rational::parse("a/b"), rational_error);
    CHECK_THROWS_AS(Rational::parse("1/"), rational_error);
    CHECK_THROWS_AS(Rational::parse("1/2/3"), rational_error);
}

TEST_CASE("[rational] overflow is an error, not a wrap") {
    Rational big(std::int64_t{1} << 62);
    CHECK_THROWS_AS(big * big, rational_error);
}
