#ifndef TANCONE_RATIONAL_HPP
#define TANCONE_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tancone {

// Exact rational scalar. cpp_rational keeps values normalized (lowest terms,
// positive denominator), which is exactly the invariant we need.
using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.template convert_to<double>(); }

inline int sign(const Rational& r) { return r.sign(); }

inline Rational rat(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    return Rational(num, den);
}

inline Rational rat_abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

inline Rational rat_pow(const Rational& base, unsigned e) {
    Rational acc(1), b = base;
    unsigned k = e;
    while (k) {
        if (k & 1u) acc *= b;
        b *= b;
        k >>= 1;
    }
    return acc;
}

inline Rational rat_min(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational rat_max(const Rational& a, const Rational& b) { return a < b ? b : a; }

// Renders without a trailing "/1".
inline std::string rat_str(const Rational& r) {
    std::string s = numerator(r).str();
    if (denominator(r) != 1) s += "/" + denominator(r).str();
    return s;
}

} // namespace tancone

#endif
