#include "prfront/rational.hpp"

#include <doctest.h>

#include <random>
#include <stdexcept>

using prfront::Rational;
using prfront::parse_rational;
using prfront::to_exact;
using prfront::to_fixed;

TEST_CASE("decimal and ratio literals parse exactly") {
    CHECK(parse_rational("206.5") == Rational(413, 2));
    CHECK(parse_rational("0.48") == Rational(12, 25));
    CHECK(parse_rational("0.087") == Rational(87, 1000));
    CHECK(parse_rational("1375/3") == Rational(1375, 3));
    CHECK(parse_rational("-3") == Rational(-3));
    CHECK(parse_rational("1e6") == Rational(1000000));
    CHECK(parse_rational("2.5E-3") == Rational(1, 400));
    CHECK(parse_rational(" 007 ") == Rational(7));
    CHECK(parse_rational(".5") == Rational(1, 2));
}

TEST_CASE("malformed literals are rejected") {
    for (const char* bad : {"", "abc", "1.2.3", "1/0", "1e", "--1", "1 2", "0x10", "1/"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(parse_rational(bad), std::invalid_argument);
    }
}

TEST_CASE("fixed rendering rounds half away from zero") {
    CHECK(to_fixed(Rational(7628, 100), 3) == "76.280");
    CHECK(to_fixed(Rational(5500, 453), 2) == "12.14");
    CHECK(to_fixed(Rational(1, 8), 2) == "0.13");
    CHECK(to_fixed(Rational(-1, 8), 2) == "-0.13");
    CHECK(to_fixed(Rational(-1, 1000), 2) == "0.00");
    CHECK(to_fixed(Rational(2), 0) == "2");
}

TEST_CASE("exact rendering round-trips") {
    CHECK(to_exact(Rational(413, 2)) == "206.5");
    CHECK(to_exact(Rational(1375, 3)) == "1375/3");
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<long> num(-100000, 100000);
    std::uniform_int_distribution<long> den(1, 5000);
    for (int i = 0; i < 500; ++i) {
        const Rational x(num(rng), den(rng));
        CHECK(parse_rational(to_exact(x)) == x);
    }
}
