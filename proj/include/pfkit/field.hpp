#pragma once

/**
 * @file field.hpp
 * @brief Prime field arithmetic over an arbitrary-precision prime.
 *
 * Elements carry their modulus. Operations on elements of different
 * fields are rejected with UsageError instead of being coerced.
 *
 * Conventions:
 * - pow(x, 0) = 1 for every x, including x = 0 (empty product).
 * - inv(x) is computed as x^(p-2) mod p by square-and-multiply.
 */

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pfkit/errors.hpp"

namespace pfkit {

using BigInt = boost::multiprecision::cpp_int;

/// A tuple of residues, ordered like the variables it was enumerated for.
using Tuple = std::vector<BigInt>;
using TupleSet = std::set<Tuple>;

/// Parses an optionally signed decimal integer. Throws FormatError.
inline BigInt parse_decimal(const std::string& text) {
    std::size_t i = 0;
    bool negative = false;
    if (i < text.size() && text[i] == '-') {
        negative = true;
        ++i;
    }
    if (i == text.size()) throw FormatError("empty integer literal '" + text + "'");
    BigInt value = 0;
    for (; i < text.size(); ++i) {
        char ch = text[i];
        if (ch < '0' || ch > '9') throw FormatError("invalid decimal integer '" + text + "'");
        value = value * 10 + (ch - '0');
    }
    return negative ? BigInt(-value) : value;
}

/// Least non-negative residue of v modulo m (m > 0).
inline BigInt reduce_mod(const BigInt& v, const BigInt& m) {
    BigInt r = v % m;
    if (r < 0) r += m;
    return r;
}

/// Number of bits in the binary representation of a non-negative integer
/// (0 for 0).
inline std::size_t bit_length(const BigInt& v) {
    if (v <= 0) return 0;
    return boost::multiprecision::msb(v) + 1;
}

namespace detail {

inline bool miller_rabin_round(const BigInt& n, const BigInt& d, unsigned s, const BigInt& a) {
    BigInt x = boost::multiprecision::powm(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (unsigned r = 1; r < s; ++r) {
        x = (x * x) % n;
        if (x == n - 1) return true;
    }
    return false;
}

}  // namespace detail

/**
 * Primality test.
 *
 * Deterministic below 3.3 * 10^24 (Miller-Rabin with the first thirteen
 * prime bases). Above that bound 32 extra rounds with bases drawn from a
 * fixed-seed generator are added, so the answer is reproducible and the
 * error probability is below 4^-45.
 */
inline bool is_prime(const BigInt& n) {
    if (n < 2) return false;
    static constexpr std::array<unsigned, 13> small_bases{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};
    for (unsigned b : small_bases) {
        if (n == b) return true;
        if (n % b == 0) return false;
    }
    BigInt d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (unsigned b : small_bases) {
        if (!detail::miller_rabin_round(n, d, s, BigInt(b))) return false;
    }
    static const BigInt deterministic_bound("3317044064679887385961981");
    if (n < deterministic_bound) return true;

    std::mt19937_64 gen(0x5eedULL);
    const std::size_t bits = bit_length(n);
    for (int round = 0; round < 32; ++round) {
        BigInt a = 0;
        for (std::size_t chunk = 0; chunk < bits; chunk += 64) a = (a << 64) | BigInt(gen());
        a = 2 + a % (n - 3);
        if (!detail::miller_rabin_round(n, d, s, a)) return false;
    }
    return true;
}

/// A prime modulus. Cheap to copy; the value is shared and immutable.
class Prime {
public:
    explicit Prime(const BigInt& value) {
        if (!is_prime(value)) throw DomainError("not a prime: " + value.str());
        value_ = std::make_shared<const BigInt>(value);
    }
    explicit Prime(std::uint64_t value) : Prime(BigInt(value)) {}

    static Prime parse(const std::string& text) { return Prime(parse_decimal(text)); }

    const BigInt& value() const noexcept { return *value_; }
    std::string str() const { return value_->str(); }
    std::size_t bits() const { return bit_length(*value_); }

    friend bool operator==(const Prime& a, const Prime& b) {
        return a.value_ == b.value_ || *a.value_ == *b.value_;
    }

private:
    std::shared_ptr<const BigInt> value_;
};

inline std::ostream& operator<<(std::ostream& os, const Prime& p) { return os << p.value(); }

/// An element of F_p, always held in canonical range [0, p).
class FieldElement {
public:
    /// Reduces any integer, negative ones included, into [0, p).
    FieldElement(const BigInt& value, Prime modulus)
        : value_(reduce_mod(value, modulus.value())), modulus_(std::move(modulus)) {}

    static FieldElement zero(const Prime& p) { return FieldElement(BigInt(0), p); }
    static FieldElement one(const Prime& p) { return FieldElement(BigInt(1), p); }

    const BigInt& value() const noexcept { return value_; }
    const Prime& modulus() const noexcept { return modulus_; }
    bool is_zero() const { return value_ == 0; }
    std::string str() const { return value_.str(); }

    friend bool operator==(const FieldElement& a, const FieldElement& b) {
        return a.value_ == b.value_ && a.modulus_ == b.modulus_;
    }
    // Orders by value only; meaningful for elements of one field.
    friend std::strong_ordering operator<=>(const FieldElement& a, const FieldElement& b) {
        if (a.value_ < b.value_) return std::strong_ordering::less;
        if (b.value_ < a.value_) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

private:
    BigInt value_;
    Prime modulus_;
};

inline std::ostream& operator<<(std::ostream& os, const FieldElement& x) { return os << x.value(); }

namespace detail {

inline const Prime& common_modulus(const FieldElement& x, const FieldElement& y) {
    if (!(x.modulus() == y.modulus())) {
        throw UsageError("modulus mismatch: " + x.modulus().str() + " vs " + y.modulus().str());
    }
    return x.modulus();
}

}  // namespace detail

inline FieldElement add(const FieldElement& x, const FieldElement& y) {
    const Prime& p = detail::common_modulus(x, y);
    BigInt s = x.value() + y.value();
    if (s >= p.value()) s -= p.value();
    return FieldElement(s, p);
}

inline FieldElement neg(const FieldElement& x) {
    if (x.is_zero()) return x;
    return FieldElement(x.modulus().value() - x.value(), x.modulus());
}

inline FieldElement sub(const FieldElement& x, const FieldElement& y) { return add(x, neg(y)); }

inline FieldElement mul(const FieldElement& x, const FieldElement& y) {
    const Prime& p = detail::common_modulus(x, y);
    return FieldElement(x.value() * y.value(), p);
}

/// x^e by square-and-multiply. pow(0, 0) = 1.
inline FieldElement pow(const FieldElement& x, BigInt e) {
    if (e < 0) throw UsageError("negative exponent");
    const BigInt& p = x.modulus().value();
    BigInt result = 1;
    BigInt base = x.value();
    while (e > 0) {
        if ((e & 1) != 0) result = (result * base) % p;
        base = (base * base) % p;
        e >>= 1;
    }
    return FieldElement(result, x.modulus());
}

inline FieldElement inv(const FieldElement& x) {
    if (x.is_zero()) throw DomainError("inverse of zero");
    return pow(x, x.modulus().value() - 2);
}

inline FieldElement div(const FieldElement& x, const FieldElement& y) {
    if (y.is_zero()) throw DomainError("division by zero");
    detail::common_modulus(x, y);
    return mul(x, inv(y));
}

inline FieldElement operator+(const FieldElement& x, const FieldElement& y) { return add(x, y); }
inline FieldElement operator-(const FieldElement& x, const FieldElement& y) { return sub(x, y); }
inline FieldElement operator*(const FieldElement& x, const FieldElement& y) { return mul(x, y); }
inline FieldElement operator/(const FieldElement& x, const FieldElement& y) { return div(x, y); }
inline FieldElement operator-(const FieldElement& x) { return neg(x); }

}  // namespace pfkit
