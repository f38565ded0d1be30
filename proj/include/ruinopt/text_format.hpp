#ifndef RUINOPT_TEXT_FORMAT_HPP
#define RUINOPT_TEXT_FORMAT_HPP

#include <string>

namespace ruinopt {

/// Fixed-point rendering with 50 decimal places for values in [0, 1].
/// The value is rounded to 17 significant digits first and zero-padded
/// beyond that, reproducing the layout of the original result files
/// (whose runtime padded past the native double precision).
std::string fixed50(double v);

/// Plain fixed rendering with 10 decimal places.
std::string fixed10(double v);

} // namespace ruinopt

#endif
