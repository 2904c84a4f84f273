#pragma once

// Coefficient types for the symbolic layer. Exact rationals (GMP) carry every
// construction that has to satisfy an identity exactly; doubles are used once
// polynomials are handed to samplers and density evaluators.

#include <gmpxx.h>

#include <cmath>
#include <string>
#include <string_view>
#include <type_traits>

namespace levyclt {

using Rational = mpq_class;

template <class T>
struct Scalar;

template <>
struct Scalar<double> {
    static constexpr bool exact = false;
    static double zero() { return 0.0; }
    static double one() { return 1.0; }
    static double from_int(long v) { return static_cast<double>(v); }
    static double from_ratio(long num, long den) { return static_cast<double>(num) / static_cast<double>(den); }
    static bool is_zero(double v) { return v == 0.0; }
    static double to_double(double v) { return v; }
    static std::string to_string(double v);
};

template <>
struct Scalar<Rational> {
    static constexpr bool exact = true;
    static Rational zero() { return Rational(0); }
    static Rational one() { return Rational(1); }
    static Rational from_int(long v) { return Rational(v); }
    static Rational from_ratio(long num, long den) {
        Rational r(num, den);
        r.canonicalize();
        return r;
    }
    static bool is_zero(const Rational& v) { return sgn(v) == 0; }
    static double to_double(const Rational& v) { return v.get_d(); }
    static std::string to_string(const Rational& v) { return v.get_str(); }
};

template <class T>
concept Coefficient = std::is_same_v<T, double> || std::is_same_v<T, Rational>;

/// Parses "p/q", an integer, or a plain decimal ("0.125", "-3e-2") into an
/// exact rational. Decimals are converted digit-exactly, not through double.
Rational parse_rational(std::string_view text);

template <Coefficient T>
T convert_rational(const Rational& r) {
    if constexpr (std::is_same_v<T, double>) {
        return r.get_d();
    } else {
        return r;
    }
}

}  // namespace levyclt
