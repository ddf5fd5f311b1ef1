#pragma once

#include <cstdint>
#include <string>

namespace fraisse {

/// Canonical reduced fraction, den > 0. Symbol names for the base-level
/// colors Q_q embed the reduced num/den pair, so equality is decidable
/// by name.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d);

    bool operator==(const Rational&) const = default;
    bool less(const Rational& rhs) const;

    std::string to_string() const;  // "n/d", always with denominator
    static Rational parse(const std::string& text);
};

/// Enumeration of the rationals: position 0 is 0, then the positive
/// Stern-Brocot tree level by level interleaved with its mirror image.
/// Level-by-level order keeps the simplest fractions early, so gaps
/// between early colors are filled by early indices.
Rational rational_at(std::size_t index);
std::size_t rational_index(const Rational& q);

/// Simplest rational strictly between lo and hi (Stern-Brocot descent).
Rational rational_between(const Rational& lo, const Rational& hi);
/// An integer strictly below / above q.
Rational rational_below(const Rational& q);
Rational rational_above(const Rational& q);

}  // namespace fraisse
