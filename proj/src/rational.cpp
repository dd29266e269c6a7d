#include "dynlab/rational.hpp"

#include "dynlab/error.hpp"

namespace dynlab {

Rational parse_rational(std::string_view text) {
  if (text.empty()) {
    throw_parse("empty rational literal");
  }
  const auto slash = text.find('/');
  try {
    if (slash == std::string_view::npos) {
      return Rational(BigInt(std::string(text)));
    }
    BigInt num{std::string(text.substr(0, slash))};
    BigInt den{std::string(text.substr(slash + 1))};
    if (den == 0) {
      throw_parse("rational with zero denominator: " + std::string(text));
    }
    return Rational(num, den);
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw_parse("malformed rational literal: " + std::string(text));
  }
}

std::string format_rational(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) {
    return num.str();
  }
  return num.str() + "/" + den.str();
}

BigInt rational_floor(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  BigInt q = num / den;
  if (num < 0 && q * den != num) {
    --q;
  }
  return q;
}

Rational frac_mod1(const Rational& r) {
  return r - Rational(rational_floor(r));
}

Rational dyadic(unsigned k) {
  BigInt den = 1;
  den <<= k;
  return Rational(BigInt(1), den);
}

unsigned agree_prefix_len(const Rational& eps) {
  if (eps <= 0) {
    throw_invalid("agree_prefix_len requires eps > 0");
  }
  unsigned t = 0;
  Rational pow{1}; // 2^-t
  while (pow >= eps) {
    pow /= 2;
    ++t;
    if (t > 4096) {
      throw_invalid("eps too small for shift metric comparisons");
    }
  }
  return t;
}

} // namespace dynlab
