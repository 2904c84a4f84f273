#include "levyclt/polycore/scalar.hpp"

#include <cctype>
#include <cstdio>
#include <stdexcept>

namespace levyclt {

std::string Scalar<double>::to_string(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

mpz_class parse_integer(std::string_view s) {
    if (s.empty()) throw std::invalid_argument("parse_rational: empty integer");
    std::string tmp(s);
    if (tmp[0] == '+') tmp.erase(0, 1);
    for (std::size_t i = (tmp[0] == '-') ? 1 : 0; i < tmp.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(tmp[i])))
            throw std::invalid_argument("parse_rational: malformed number '" + std::string(s) + "'");
    return mpz_class(tmp, 10);
}

}  // namespace

Rational parse_rational(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) throw std::invalid_argument("parse_rational: empty input");

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        mpz_class num = parse_integer(text.substr(0, slash));
        mpz_class den = parse_integer(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("parse_rational: zero denominator");
        Rational r(num, den);
        r.canonicalize();
        return r;
    }

    // decimal with optional exponent
    std::string_view mant = text;
    long exp10 = 0;
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
        mant = text.substr(0, e);
        exp10 = parse_integer(text.substr(e + 1)).get_si();
    }
    bool neg = false;
    if (!mant.empty() && (mant.front() == '-' || mant.front() == '+')) {
        neg = mant.front() == '-';
        mant.remove_prefix(1);
    }
    std::string digits;
    long frac_digits = 0;
    bool seen_dot = false;
    for (char ch : mant) {
        if (ch == '.') {
            if (seen_dot) throw std::invalid_argument("parse_rational: malformed number '" + std::string(text) + "'");
            seen_dot = true;
        } else if (std::isdigit(static_cast<unsigned char>(ch))) {
            digits.push_back(ch);
            if (seen_dot) ++frac_digits;
        } else {
            throw std::invalid_argument("parse_rational: malformed number '" + std::string(text) + "'");
        }
    }
    if (digits.empty()) throw std::invalid_argument("parse_rational: malformed number '" + std::string(text) + "'");
    mpz_class num(digits, 10);
    if (neg) num = -num;
    long shift = exp10 - frac_digits;
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
    Rational r = shift >= 0 ? Rational(num * scale) : Rational(num, scale);
    r.canonicalize();
    return r;
}

}  // namespace levyclt
