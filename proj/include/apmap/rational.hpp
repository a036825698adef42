#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <string>

namespace apm {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

// Exact binary expansion of a finite double.
inline Rat rat_of_double(double d) { return Rat(d); }

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

inline int rat_sign(const Rat& r) { return r < 0 ? -1 : (r > 0 ? 1 : 0); }

// 2^-n for n >= 0.
inline Rat pow2_neg(int n) { return Rat(BigInt(1), BigInt(1) << n); }

inline Rat pow2(int n) { return n >= 0 ? Rat(BigInt(1) << n) : pow2_neg(-n); }

std::string rat_to_string(const Rat& r);
bool parse_rat(const std::string& tok, Rat& out);

}  // namespace apm
