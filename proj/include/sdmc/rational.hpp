#pragma once

#include <cstdint>
#include <string>

#include <boost/rational.hpp>

namespace sdmc {

using Rational = boost::rational<std::int64_t>;

inline std::string to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// Fixed six-digit decimal rendering, for human-readable tables.
std::string to_decimal(const Rational& r, int digits = 6);

// Parses "a", "a/b" or a JSON-style integer string.
Rational parse_rational(const std::string& s);

}  // namespace sdmc
