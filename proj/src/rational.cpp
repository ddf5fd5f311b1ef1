#include "fraisse/rational.hpp"

#include <numeric>
#include <stdexcept>

#include "fraisse/errors.hpp"

namespace fraisse {

namespace {

// a/b < c/d with int64 inputs, exact
bool frac_less(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
    return static_cast<__int128>(a) * d < static_cast<__int128>(c) * b;
}

struct Frac {
    std::int64_t num, den;
};

Frac mediant(const Frac& a, const Frac& b) {
    if (a.num > (INT64_MAX >> 1) || b.num > (INT64_MAX >> 1) || a.den > (INT64_MAX >> 1) ||
        b.den > (INT64_MAX >> 1))
        throw BoundExceeded("rational beyond the desk-scale Stern-Brocot horizon");
    return Frac{a.num + b.num, a.den + b.den};
}

constexpr std::size_t kMaxLevel = 60;

// positive rational at Stern-Brocot level/position
Frac stern_brocot(std::size_t level, std::size_t pos) {
    Frac lo{0, 1}, hi{1, 0}, node{1, 1};
    for (std::size_t i = level; i-- > 0;) {
        if ((pos >> i) & 1u)
            lo = node;
        else
            hi = node;
        node = mediant(lo, hi);
    }
    return node;
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) {
    if (d == 0) throw Error("zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    num = n;
    den = d;
}

bool Rational::less(const Rational& rhs) const {
    return frac_less(num, den, rhs.num, rhs.den);
}

std::string Rational::to_string() const {
    return std::to_string(num) + "/" + std::to_string(den);
}

Rational Rational::parse(const std::string& text) {
    auto slash = text.find('/');
    if (slash == std::string::npos) return Rational(std::stoll(text), 1);
    return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
}

Rational rational_at(std::size_t index) {
    if (index == 0) return Rational(0, 1);
    std::size_t m = (index - 1) / 2;
    bool negative = (index % 2 == 0);
    // m-th entry of the level-by-level positive tree
    std::size_t level = 0;
    while (((std::size_t{1} << (level + 1)) - 1) <= m) {
        ++level;
        if (level > kMaxLevel) throw BoundExceeded("rational enumeration index too large");
    }
    std::size_t pos = m - ((std::size_t{1} << level) - 1);
    Frac f = stern_brocot(level, pos);
    return Rational(negative ? -f.num : f.num, f.den);
}

std::size_t rational_index(const Rational& q) {
    if (q.num == 0) return 0;
    bool negative = q.num < 0;
    std::int64_t n = negative ? -q.num : q.num;
    std::int64_t d = q.den;
    // descend the positive tree recording the path
    Frac lo{0, 1}, hi{1, 0}, node{1, 1};
    std::size_t level = 0, pos = 0;
    while (!(node.num == n && node.den == d)) {
        if (++level > kMaxLevel) throw BoundExceeded("rational too deep in the Stern-Brocot tree");
        pos <<= 1;
        if (frac_less(node.num, node.den, n, d)) {
            pos |= 1;
            lo = node;
        } else {
            hi = node;
        }
        node = mediant(lo, hi);
    }
    std::size_t m = ((std::size_t{1} << level) - 1) + pos;
    return negative ? (2 * m + 2) : (2 * m + 1);
}

namespace {

std::int64_t rational_floor(const Rational& q) {
    return q.num >= 0 ? q.num / q.den : -((-q.num + q.den - 1) / q.den);
}

}  // namespace

Rational rational_between(const Rational& lo, const Rational& hi) {
    if (!lo.less(hi)) throw Error("rational_between: lo must be below hi");
    std::int64_t n = rational_floor(lo);
    Rational integer(n + 1, 1);
    if (lo.less(integer) && integer.less(hi)) return integer;
    // both bounds in (n, n+1): Stern-Brocot descent on the unit interval
    Rational lo_frac(lo.num - n * lo.den, lo.den);
    Rational hi_frac = hi.less(Rational(n + 1, 1)) ? Rational(hi.num - n * hi.den, hi.den)
                                                   : Rational(1, 1);
    Frac a{0, 1}, b{1, 1};
    for (std::size_t steps = 0; steps <= 2 * kMaxLevel; ++steps) {
        Frac node = mediant(a, b);
        if (!frac_less(lo_frac.num, lo_frac.den, node.num, node.den)) {
            a = node;
        } else if (!frac_less(node.num, node.den, hi_frac.num, hi_frac.den)) {
            b = node;
        } else {
            return Rational(node.num + n * node.den, node.den);
        }
    }
    throw BoundExceeded("rational_between: descent exceeded the horizon");
}

Rational rational_below(const Rational& q) {
    return Rational(rational_floor(q) - 1, 1);
}

Rational rational_above(const Rational& q) {
    return Rational(rational_floor(q) + 1, 1);
}

}  // namespace fraisse
