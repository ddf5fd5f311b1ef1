#include "fraisse/bignat.hpp"

#include <algorithm>

#include "fraisse/errors.hpp"

namespace fraisse {

BigNat::BigNat(std::uint64_t v) {
    if (v != 0) words_.push_back(v);
}

BigNat BigNat::from_decimal(const std::string& text) {
    if (text.empty()) throw Error("empty decimal literal");
    BigNat n;
    for (char c : text) {
        if (c < '0' || c > '9') throw Error("bad decimal literal: " + text);
        n.mul_small(10);
        n.add_small(static_cast<std::uint64_t>(c - '0'));
    }
    return n;
}

std::uint64_t BigNat::to_u64() const {
    if (words_.size() > 1) throw BoundExceeded("index does not fit in 64 bits");
    return words_.empty() ? 0 : words_[0];
}

std::size_t BigNat::bit_length() const {
    if (words_.empty()) return 0;
    std::uint64_t top = words_.back();
    std::size_t bits = (words_.size() - 1) * 64;
    while (top != 0) {
        ++bits;
        top >>= 1;
    }
    return bits;
}

bool BigNat::bit(std::size_t pos) const {
    std::size_t w = pos / 64;
    if (w >= words_.size()) return false;
    return (words_[w] >> (pos % 64)) & 1u;
}

void BigNat::set_bit(std::size_t pos) {
    std::size_t w = pos / 64;
    if (w >= words_.size()) words_.resize(w + 1, 0);
    words_[w] |= (std::uint64_t{1} << (pos % 64));
}

void BigNat::trim() {
    while (!words_.empty() && words_.back() == 0) words_.pop_back();
}

BigNat& BigNat::operator+=(const BigNat& rhs) {
    std::size_t n = std::max(words_.size(), rhs.words_.size());
    words_.resize(n, 0);
    unsigned __int128 carry = 0;
    for (std::size_t i = 0; i < n; ++i) {
        unsigned __int128 sum = carry + words_[i];
        if (i < rhs.words_.size()) sum += rhs.words_[i];
        words_[i] = static_cast<std::uint64_t>(sum);
        carry = sum >> 64;
    }
    if (carry != 0) words_.push_back(static_cast<std::uint64_t>(carry));
    return *this;
}

BigNat& BigNat::operator-=(const BigNat& rhs) {
    if (*this < rhs) throw Error("BigNat underflow");
    std::uint64_t borrow = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) {
        unsigned __int128 sub = borrow;
        if (i < rhs.words_.size()) sub += rhs.words_[i];
        if (static_cast<unsigned __int128>(words_[i]) >= sub) {
            words_[i] -= static_cast<std::uint64_t>(sub);
            borrow = 0;
        } else {
            unsigned __int128 lifted = (static_cast<unsigned __int128>(1) << 64) + words_[i];
            words_[i] = static_cast<std::uint64_t>(lifted - sub);
            borrow = 1;
        }
    }
    trim();
    return *this;
}

BigNat BigNat::operator+(const BigNat& rhs) const {
    BigNat out = *this;
    out += rhs;
    return out;
}

BigNat BigNat::operator-(const BigNat& rhs) const {
    BigNat out = *this;
    out -= rhs;
    return out;
}

BigNat& BigNat::mul_small(std::uint64_t m) {
    if (m == 0 || words_.empty()) {
        words_.clear();
        return *this;
    }
    unsigned __int128 carry = 0;
    for (auto& w : words_) {
        unsigned __int128 prod = static_cast<unsigned __int128>(w) * m + carry;
        w = static_cast<std::uint64_t>(prod);
        carry = prod >> 64;
    }
    if (carry != 0) words_.push_back(static_cast<std::uint64_t>(carry));
    return *this;
}

BigNat& BigNat::add_small(std::uint64_t a) {
    return *this += BigNat(a);
}

std::uint64_t BigNat::divmod_small(std::uint64_t d) {
    if (d == 0) throw Error("division by zero");
    unsigned __int128 rem = 0;
    for (std::size_t i = words_.size(); i-- > 0;) {
        unsigned __int128 cur = (rem << 64) | words_[i];
        words_[i] = static_cast<std::uint64_t>(cur / d);
        rem = cur % d;
    }
    trim();
    return static_cast<std::uint64_t>(rem);
}

BigNat BigNat::shifted_left(std::size_t bits) const {
    if (words_.empty()) return {};
    BigNat out;
    std::size_t len = bit_length();
    for (std::size_t i = 0; i < len; ++i)
        if (bit(i)) out.set_bit(i + bits);
    return out;
}

BigNat BigNat::shifted_right(std::size_t bits) const {
    BigNat out;
    std::size_t len = bit_length();
    for (std::size_t i = bits; i < len; ++i)
        if (bit(i)) out.set_bit(i - bits);
    return out;
}

std::strong_ordering BigNat::operator<=>(const BigNat& rhs) const {
    if (words_.size() != rhs.words_.size())
        return words_.size() <=> rhs.words_.size();
    for (std::size_t i = words_.size(); i-- > 0;) {
        if (words_[i] != rhs.words_[i]) return words_[i] <=> rhs.words_[i];
    }
    return std::strong_ordering::equal;
}

std::string BigNat::to_decimal() const {
    if (words_.empty()) return "0";
    BigNat tmp = *this;
    std::string digits;
    while (!tmp.is_zero()) {
        digits.push_back(static_cast<char>('0' + tmp.divmod_small(10)));
    }
    std::reverse(digits.begin(), digits.end());
    return digits;
}

std::size_t BigNat::hash() const {
    std::size_t seed = words_.size();
    for (auto w : words_) {
        seed ^= static_cast<std::size_t>(w) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    }
    return seed;
}

BigNat pair_encode(const BigNat& a, const BigNat& b) {
    BigNat out;
    std::size_t la = a.bit_length(), lb = b.bit_length();
    for (std::size_t i = 0; i < la; ++i)
        if (a.bit(i)) out.set_bit(2 * i);
    for (std::size_t i = 0; i < lb; ++i)
        if (b.bit(i)) out.set_bit(2 * i + 1);
    return out;
}

std::pair<BigNat, BigNat> pair_decode(const BigNat& p) {
    BigNat a, b;
    std::size_t len = p.bit_length();
    for (std::size_t i = 0; i < len; ++i) {
        if (!p.bit(i)) continue;
        if (i % 2 == 0)
            a.set_bit(i / 2);
        else
            b.set_bit(i / 2);
    }
    return {a, b};
}

BigNat set_encode(const std::vector<std::size_t>& elems) {
    BigNat mask;
    for (std::size_t e : elems) mask.set_bit(e);
    return mask;
}

std::vector<std::size_t> set_decode(const BigNat& mask) {
    std::vector<std::size_t> out;
    std::size_t len = mask.bit_length();
    for (std::size_t i = 0; i < len; ++i)
        if (mask.bit(i)) out.push_back(i);
    return out;
}

}  // namespace fraisse
