#include "syzlab/rational.hpp"

#include <cmath>

#include "syzlab/errors.hpp"

namespace syzlab {

std::string to_string(const Rational& q) {
  if (boost::multiprecision::denominator(q) == 1) return boost::multiprecision::numerator(q).str();
  return q.str();
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  s.erase(0, s.find_first_not_of(" \t\""));
  s.erase(s.find_last_not_of(" \t\"") + 1);
  if (s.empty()) throw ValidationError("rational: empty literal");
  try {
    if (s.find_first_of(".eE") != std::string::npos) {
      // Decimal literal: split mantissa and exponent, scale by powers of ten exactly.
      std::size_t epos = s.find_first_of("eE");
      std::string mant = s.substr(0, epos);
      long exp10 = epos == std::string::npos ? 0 : std::stol(s.substr(epos + 1));
      bool neg = !mant.empty() && mant[0] == '-';
      if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) mant.erase(0, 1);
      std::size_t dot = mant.find('.');
      std::string digits = mant;
      if (dot != std::string::npos) {
        exp10 -= static_cast<long>(mant.size() - dot - 1);
        digits.erase(dot, 1);
      }
      if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
        throw ValidationError("rational: malformed literal '" + s + "'");
      Rational value{BigInt(digits)};
      BigInt ten_pow = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::labs(exp10)));
      if (exp10 >= 0) value *= Rational(ten_pow);
      else value /= Rational(ten_pow);
      return neg ? Rational(-value) : value;
    }
    return Rational(s);
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception&) {
    throw ValidationError("rational: malformed literal '" + s + "'");
  }
}

Rational exact(double x) {
  if (!std::isfinite(x)) throw ValidationError("rational: non-finite value");
  return Rational(x);
}

bool is_integer(const Rational& q) { return boost::multiprecision::denominator(q) == 1; }

}  // namespace syzlab
