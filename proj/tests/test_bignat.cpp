#include <doctest.h>

#include "fraisse/bignat.hpp"
#include "fraisse/errors.hpp"
#include "fraisse/rational.hpp"

using namespace fraisse;

TEST_CASE("bignat arithmetic basics") {
    BigNat a(0), b(7);
    CHECK(a.is_zero());
    CHECK((a + b).to_u64() == 7);
    BigNat big = BigNat(1).shifted_left(100);
    CHECK(!big.fits_u64());
    CHECK((big - big).is_zero());
    CHECK(big.bit(100));
    CHECK(!big.bit(99));
    CHECK(big.bit_length() == 101);
    BigNat c = big;
    c -= BigNat(1);
    CHECK(c.bit_length() == 100);
    CHECK(c < big);
    CHECK(BigNat::from_decimal(big.to_decimal()) == big);
    CHECK(BigNat::from_decimal("1267650600228229401496703205376") == big);
    BigNat d(10);
    d.mul_small(10);
    CHECK(d.divmod_small(7) == 2);
    CHECK(d.to_u64() == 14);
}

TEST_CASE("pairing is a bijection on a grid") {
    for (std::uint64_t a = 0; a < 40; ++a) {
        for (std::uint64_t b = 0; b < 40; ++b) {
            auto [x, y] = pair_decode(pair_encode(BigNat(a), BigNat(b)));
            CHECK(x.to_u64() == a);
            CHECK(y.to_u64() == b);
        }
    }
    // decode is total: every code decodes and re-encodes to itself
    for (std::uint64_t p = 0; p < 500; ++p) {
        auto [x, y] = pair_decode(BigNat(p));
        CHECK(pair_encode(x, y).to_u64() == p);
    }
}

TEST_CASE("set coding round trip") {
    std::vector<std::size_t> set{0, 3, 17, 64};
    CHECK(set_decode(set_encode(set)) == set);
}

TEST_CASE("rational enumeration is its own inverse") {
    for (std::size_t k = 0; k < 400; ++k) {
        Rational q = rational_at(k);
        CHECK(rational_index(q) == k);
    }
    CHECK(rational_at(0) == Rational(0, 1));
    CHECK(rational_at(1) == Rational(1, 1));
    CHECK(rational_at(2) == Rational(-1, 1));
}

TEST_CASE("rational between and beyond") {
    Rational lo(1, 3), hi(1, 2);
    Rational mid = rational_between(lo, hi);
    CHECK(lo.less(mid));
    CHECK(mid.less(hi));
    CHECK(mid == Rational(2, 5));  // the Stern-Brocot mediant
    CHECK(rational_between(Rational(-1, 1), Rational(1, 1)) == Rational(0, 1));
    CHECK(rational_below(Rational(-1, 2)).less(Rational(-1, 2)));
    CHECK(Rational(7, 2).less(rational_above(Rational(7, 2))));
    CHECK_THROWS_AS(rational_between(hi, lo), Error);
}
