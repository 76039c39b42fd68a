#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace hdim {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

// Parse a decimal literal ("0.1", "10", "-2.25") into an exact rational.
BigRat parse_decimal_rational(const std::string& text);

BigInt ipow(BigInt base, unsigned exp);

} // namespace hdim
