#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <stdexcept>
#include <string>

namespace supenv {

// Raised for anything that would produce -inf, NaN or an undefined
// extended-real operation (inf - inf, 0 * inf).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A value in (-inf, +inf]. +inf is a tag, never a float sentinel, so that
// comparisons and max/min are exact.
class ExtendedValue {
public:
    constexpr ExtendedValue() = default;

    // Ingests a double. +HUGE_VAL maps to the +inf tag; -inf and NaN throw.
    static ExtendedValue from_double(double v) {
        if (std::isnan(v)) throw DomainError("NaN is not an extended value");
        if (std::isinf(v)) {
            if (v < 0) throw DomainError("-inf is not an admissible value");
            return infinity();
        }
        return ExtendedValue(v, false);
    }
    static constexpr ExtendedValue finite(double v) { return ExtendedValue(v, false); }
    static constexpr ExtendedValue infinity() { return ExtendedValue(0.0, true); }

    constexpr bool is_infinite() const { return infinite_; }
    constexpr bool is_finite() const { return !infinite_; }

    // Finite payload. Precondition: is_finite().
    double value() const {
        if (infinite_) throw DomainError("value() on +inf");
        return value_;
    }

    // Lossy view for plotting and numeric kernels: +inf becomes HUGE_VAL.
    constexpr double to_double() const {
        return infinite_ ? std::numeric_limits<double>::infinity() : value_;
    }

    friend constexpr bool operator==(const ExtendedValue& a, const ExtendedValue& b) {
        if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
        return a.value_ == b.value_;
    }
    friend constexpr std::partial_ordering operator<=>(const ExtendedValue& a,
                                                       const ExtendedValue& b) {
        if (a.infinite_ && b.infinite_) return std::partial_ordering::equivalent;
        if (a.infinite_) return std::partial_ordering::greater;
        if (b.infinite_) return std::partial_ordering::less;
        return a.value_ <=> b.value_;
    }

    friend ExtendedValue operator+(const ExtendedValue& a, const ExtendedValue& b) {
        if (a.infinite_ || b.infinite_) return infinity();
        return from_double(a.value_ + b.value_);
    }
    friend ExtendedValue operator-(const ExtendedValue& a, const ExtendedValue& b) {
        if (b.infinite_) {
            if (a.infinite_) throw DomainError("inf - inf is undefined");
            throw DomainError("finite - inf would be -inf");
        }
        if (a.infinite_) return infinity();
        return from_double(a.value_ - b.value_);
    }
    ExtendedValue operator-() const {
        if (infinite_) throw DomainError("negating inf would give -inf");
        return finite(-value_);
    }
    friend ExtendedValue operator*(const ExtendedValue& a, const ExtendedValue& b) {
        if (a.infinite_ || b.infinite_) {
            const ExtendedValue& other = a.infinite_ ? b : a;
            if (other.infinite_) return infinity();
            if (other.value_ > 0) return infinity();
            if (other.value_ == 0) throw DomainError("0 * inf is undefined");
            throw DomainError("negative * inf would be -inf");
        }
        return from_double(a.value_ * b.value_);
    }

private:
    constexpr ExtendedValue(double v, bool inf) : value_(v), infinite_(inf) {}

    double value_ = 0.0;
    bool infinite_ = false;
};

inline constexpr ExtendedValue kInfinity = ExtendedValue::infinity();

inline ExtendedValue max(const ExtendedValue& a, const ExtendedValue& b) { return a < b ? b : a; }
inline ExtendedValue min(const ExtendedValue& a, const ExtendedValue& b) { return b < a ? b : a; }

// p-th root with inf^(1/p) = inf.
inline ExtendedValue root(const ExtendedValue& v, double p) {
    if (v.is_infinite()) return v;
    if (v.value() < 0) throw DomainError("root of a negative value");
    return ExtendedValue::finite(std::pow(v.value(), 1.0 / p));
}

std::string to_string(const ExtendedValue& v);

}  // namespace supenv
