#include "certivex/bigint.hpp"

namespace certivex {

BigInt quot(const BigInt& n, const BigInt& d) {
  if (d == 0) return 0;
  return n / d;  // cpp_int truncates toward zero
}

BigInt rem(const BigInt& n, const BigInt& d) {
  if (d == 0) return n;
  return n % d;
}

BigInt floor_div(const BigInt& n, const BigInt& d) {
  BigInt q = n / d;
  if ((n % d != 0) && ((n < 0) != (d < 0))) --q;
  return q;
}

BigInt floor(const Rational& q) {
  return floor_div(boost::multiprecision::numerator(q), boost::multiprecision::denominator(q));
}

BigInt ceil(const Rational& q) { return -floor(-q); }

BigInt gcd(const BigInt& a, const BigInt& b) {
  BigInt x = abs(a);
  BigInt y = abs(b);
  while (y != 0) {
    BigInt t = x % y;
    x = y;
    y = t;
  }
  return x;
}

}  // namespace certivex
