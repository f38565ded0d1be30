#include "ruinopt/text_format.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace ruinopt {

std::string fixed50(double v) {
    if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument("fixed50: value must be finite and nonnegative");
    if (v == 0.0) return "0." + std::string(50, '0');

    // 17 significant digits: d.dddddddddddddddd e+XX
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    const char* e = std::strchr(buf, 'e');
    const int exp10 = std::atoi(e + 1);
    char digits[18];
    digits[0] = buf[0];
    std::memcpy(digits + 1, buf + 2, 16); // skip the '.'
    digits[17] = '\0';

    // Lay the 17 digits into a fixed-point string with 50 decimals.
    // exp10 is the power of ten of the leading digit.
    std::string out;
    if (exp10 >= 0) {
        // Integer part takes exp10+1 digits (values here are at most ~1).
        out.assign(digits, digits + exp10 + 1);
        out += '.';
        std::string frac(digits + exp10 + 1);
        frac.resize(50, '0');
        out += frac;
    } else {
        std::string frac(static_cast<size_t>(-exp10 - 1), '0');
        frac += digits;
        if (frac.size() > 50) {
            // Digits extend past the 50th decimal: round the tail away.
            // (Values that small carry fewer significant digits in files.)
            bool round_up = frac[50] >= '5';
            frac.resize(50);
            for (int i = 49; round_up && i >= 0; --i) {
                if (frac[static_cast<size_t>(i)] == '9') {
                    frac[static_cast<size_t>(i)] = '0';
                } else {
                    ++frac[static_cast<size_t>(i)];
                    round_up = false;
                }
            }
        } else {
            frac.resize(50, '0');
        }
        out = "0." + frac;
    }
    return out;
}

std::string fixed10(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10f", v);
    return buf;
}

} // namespace ruinopt
