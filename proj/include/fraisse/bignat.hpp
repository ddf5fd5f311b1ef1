#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace fraisse {

/// Unbounded natural number. Canonical member indices of the shipped ages
/// (bitmask and digit codings) outgrow 64 bits as soon as stages do, so
/// indices are carried as BigNat throughout.
class BigNat {
public:
    BigNat() = default;
    BigNat(std::uint64_t v);  // NOLINT: implicit by design, indices mix with literals

    static BigNat from_decimal(const std::string& text);

    bool is_zero() const { return words_.empty(); }
    bool fits_u64() const { return words_.size() <= 1; }
    std::uint64_t to_u64() const;  // throws BoundExceeded if too large

    // number of significant bits; 0 for zero
    std::size_t bit_length() const;
    bool bit(std::size_t pos) const;
    void set_bit(std::size_t pos);

    BigNat& operator+=(const BigNat& rhs);
    BigNat& operator-=(const BigNat& rhs);  // throws on underflow
    BigNat& operator++() { return *this += BigNat(1); }

    BigNat operator+(const BigNat& rhs) const;
    BigNat operator-(const BigNat& rhs) const;

    BigNat& mul_small(std::uint64_t m);
    BigNat& add_small(std::uint64_t a);
    /// Divides in place by d (d > 0), returns the remainder.
    std::uint64_t divmod_small(std::uint64_t d);

    BigNat shifted_left(std::size_t bits) const;
    BigNat shifted_right(std::size_t bits) const;

    bool operator==(const BigNat& rhs) const { return words_ == rhs.words_; }
    std::strong_ordering operator<=>(const BigNat& rhs) const;

    std::string to_decimal() const;
    std::size_t hash() const;

private:
    // little-endian 64-bit words, no trailing zero words
    std::vector<std::uint64_t> words_;
    void trim();
    friend BigNat pair_encode(const BigNat&, const BigNat&);
    friend std::pair<BigNat, BigNat> pair_decode(const BigNat&);
};

/// Bit-interleaving pairing: a on even bit positions, b on odd.
/// Total and bijective on naturals; used by the composite index codings.
BigNat pair_encode(const BigNat& a, const BigNat& b);
std::pair<BigNat, BigNat> pair_decode(const BigNat& p);

/// Finite sets of naturals as bitmasks (the standard D_n coding).
BigNat set_encode(const std::vector<std::size_t>& elems);
std::vector<std::size_t> set_decode(const BigNat& mask);

struct BigNatHash {
    std::size_t operator()(const BigNat& n) const { return n.hash(); }
};

}  // namespace fraisse
