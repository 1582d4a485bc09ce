#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace certivex {

/// Mathematical integers for symbolic terms, annotations and the solver.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline std::string to_string(const BigInt& v) { return v.str(); }

/// Division and remainder truncating toward zero, with x / 0 = 0 and
/// x % 0 = x so that they are total in annotations.
BigInt quot(const BigInt& n, const BigInt& d);
BigInt rem(const BigInt& n, const BigInt& d);

BigInt floor_div(const BigInt& n, const BigInt& d);
BigInt floor(const Rational& q);
BigInt ceil(const Rational& q);

BigInt gcd(const BigInt& a, const BigInt& b);

}  // namespace certivex
