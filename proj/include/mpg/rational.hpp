#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace mpg {

__extension__ using wide_int = __int128;

/// Exact rational with 64-bit numerator and positive denominator, always in lowest terms.
/// Arithmetic goes through 128-bit intermediates and throws std::overflow_error when a
/// reduced result no longer fits.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t value) : num_(value) {} // NOLINT(google-explicit-constructor)
    Rational(std::int64_t num, std::int64_t den) { *this = make(num, den); }

    constexpr std::int64_t num() const { return num_; }
    constexpr std::int64_t den() const { return den_; }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    std::string str() const {
        return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
    }

    friend Rational operator+(Rational a, Rational b) {
        return make(static_cast<wide_int>(a.num_) * b.den_ + static_cast<wide_int>(b.num_) * a.den_,
                    static_cast<wide_int>(a.den_) * b.den_);
    }
    friend Rational operator-(Rational a, Rational b) {
        return make(static_cast<wide_int>(a.num_) * b.den_ - static_cast<wide_int>(b.num_) * a.den_,
                    static_cast<wide_int>(a.den_) * b.den_);
    }
    friend Rational operator*(Rational a, Rational b) {
        return make(static_cast<wide_int>(a.num_) * b.num_, static_cast<wide_int>(a.den_) * b.den_);
    }
    friend Rational operator/(Rational a, Rational b) {
        if (b.num_ == 0) throw std::domain_error("rational division by zero");
        return make(static_cast<wide_int>(a.num_) * b.den_, static_cast<wide_int>(a.den_) * b.num_);
    }
    Rational operator-() const { return make(-static_cast<wide_int>(num_), den_); }
    Rational& operator+=(Rational o) { return *this = *this + o; }
    Rational& operator-=(Rational o) { return *this = *this - o; }

    friend bool operator==(Rational a, Rational b) { return a.num_ == b.num_ && a.den_ == b.den_; }
    friend std::strong_ordering operator<=>(Rational a, Rational b) {
        const wide_int l = static_cast<wide_int>(a.num_) * b.den_;
        const wide_int r = static_cast<wide_int>(b.num_) * a.den_;
        return l <=> r;
    }
    friend std::ostream& operator<<(std::ostream& os, Rational q) { return os << q.str(); }

private:
    static wide_int gcd128(wide_int a, wide_int b) {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b != 0) {
            const wide_int t = a % b;
            a = b;
            b = t;
        }
        return a;
    }

    static Rational make(wide_int num, wide_int den) {
        if (den == 0) throw std::domain_error("rational with zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const wide_int g = gcd128(num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
        constexpr wide_int lo = INT64_MIN;
        constexpr wide_int hi = INT64_MAX;
        if (num < lo || num > hi || den > hi) throw std::overflow_error("rational overflow");
        Rational q;
        q.num_ = static_cast<std::int64_t>(num);
        q.den_ = static_cast<std::int64_t>(den);
        return q;
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

} // namespace mpg
