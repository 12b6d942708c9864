#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace h2kin::cli {

enum class Quantity { Temperature, Pressure, Length, Velocity, Time, Dimensionless };

/// Malformed value or unit on the command line.
class UnitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses "<number><unit>" into SI. Units: K; Pa, kPa, MPa, bar, atm;
/// m, cm, mm, um, nm; m/s, cm/s; s, ms, us, ns. A bare number is accepted
/// only for temperatures (kelvin) and dimensionless values.
double parse_quantity(std::string_view text, Quantity q);

/// "a:b:step" (inclusive, step > 0) or a comma list "a,b,c", in the order
/// written.
std::vector<double> parse_list(std::string_view text, Quantity q);

/// "a:b" spans the 1-2-2.5-4-5 ladder per decade between a and b inclusive;
/// otherwise as parse_list.
std::vector<double> parse_spacing_list(std::string_view text);

}  // namespace h2kin::cli
