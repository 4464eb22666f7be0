#include "sdmc/rational.hpp"

#include <cstdlib>

#include "sdmc/error.hpp"

namespace sdmc {

std::string to_decimal(const Rational& r, int digits) {
    // Rounded half away from zero at the last printed digit.
    __extension__ using i128 = __int128;
    i128 scale = 1;
    for (int k = 0; k < digits; ++k) scale *= 10;
    i128 num = r.numerator();
    const i128 den = r.denominator();
    const bool negative = num < 0;
    if (negative) num = -num;
    const i128 scaled = (num * scale * 2 + den) / (den * 2);
    std::string frac;
    i128 whole = scaled / scale, rest = scaled % scale;
    for (int k = 0; k < digits; ++k) {
        frac.insert(frac.begin(), static_cast<char>('0' + static_cast<int>(rest % 10)));
        rest /= 10;
    }
    std::string out = negative && scaled != 0 ? "-" : "";
    out += std::to_string(static_cast<std::int64_t>(whole));
    if (digits > 0) out += "." + frac;
    return out;
}

Rational parse_rational(const std::string& s) {
    const auto slash = s.find('/');
    char* end = nullptr;
    const std::int64_t a = std::strtoll(s.c_str(), &end, 10);
    if (slash == std::string::npos) {
        require(end != s.c_str() && *end == '\0', Errc::parse_error, "bad rational '" + s + "'");
        return Rational(a);
    }
    require(end == s.c_str() + slash, Errc::parse_error, "bad rational '" + s + "'");
    const char* tail = s.c_str() + slash + 1;
    const std::int64_t b = std::strtoll(tail, &end, 10);
    require(end != tail && *end == '\0' && b != 0, Errc::parse_error, "bad rational '" + s + "'");
    return Rational(a, b);
}

}  // namespace sdmc
