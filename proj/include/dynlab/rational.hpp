#ifndef DYNLAB_RATIONAL_HPP
#define DYNLAB_RATIONAL_HPP

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace dynlab {

// Exact rational arithmetic for angles, arc endpoints, metric values.
// Window computations never touch floating point.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses "p/q" or "p" (q > 0 after normalization). Throws Error(parse).
Rational parse_rational(std::string_view text);

/// Formats as "p/q", or "p" when the denominator is 1.
std::string format_rational(const Rational& r);

/// Largest integer <= r.
BigInt rational_floor(const Rational& r);

/// r - floor(r), always in [0, 1).
Rational frac_mod1(const Rational& r);

/// 2^-k as an exact rational.
Rational dyadic(unsigned k);

/// Smallest t >= 0 with 2^-t < eps; two shift points are closer than eps
/// exactly when they agree on indices [0, t). Requires eps > 0.
unsigned agree_prefix_len(const Rational& eps);

} // namespace dynlab

#endif
