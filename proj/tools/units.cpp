#include "units.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <utility>

namespace h2kin::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

const std::vector<std::pair<std::string_view, double>>& units_for(Quantity q) {
  static const std::vector<std::pair<std::string_view, double>> temperature{{"K", 1.0}};
  static const std::vector<std::pair<std::string_view, double>> pressure{
      {"Pa", 1.0}, {"kPa", 1e3}, {"MPa", 1e6}, {"bar", 1e5}, {"atm", 101325.0}};
  static const std::vector<std::pair<std::string_view, double>> length{
      {"m", 1.0}, {"cm", 1e-2}, {"mm", 1e-3}, {"um", 1e-6}, {"\xC2\xB5m", 1e-6}, {"nm", 1e-9}};
  static const std::vector<std::pair<std::string_view, double>> velocity{{"m/s", 1.0}, {"cm/s", 1e-2}};
  static const std::vector<std::pair<std::string_view, double>> time{
      {"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"\xC2\xB5s", 1e-6}, {"ns", 1e-9}};
  static const std::vector<std::pair<std::string_view, double>> none{};
  switch (q) {
    case Quantity::Temperature: return temperature;
    case Quantity::Pressure: return pressure;
    case Quantity::Length: return length;
    case Quantity::Velocity: return velocity;
    case Quantity::Time: return time;
    case Quantity::Dimensionless: return none;
  }
  return none;
}

const char* describe(Quantity q) {
  switch (q) {
    case Quantity::Temperature: return "temperature (K)";
    case Quantity::Pressure: return "pressure (Pa, kPa, MPa, bar, atm)";
    case Quantity::Length: return "length (m, cm, mm, um, nm)";
    case Quantity::Velocity: return "velocity (m/s, cm/s)";
    case Quantity::Time: return "time (s, ms, us, ns)";
    case Quantity::Dimensionless: return "dimensionless number";
  }
  return "value";
}

}  // namespace

double parse_quantity(std::string_view text, Quantity q) {
  std::string_view s = trim(text);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || !std::isfinite(v))
    throw UnitError("'" + std::string(text) + "' is not a number with a unit; expected " + describe(q));
  std::string_view unit = trim(std::string_view(res.ptr, static_cast<std::size_t>(s.data() + s.size() - res.ptr)));
  if (unit.empty()) {
    if (q == Quantity::Temperature || q == Quantity::Dimensionless) return v;
    throw UnitError("'" + std::string(text) + "' needs a unit; expected " + describe(q));
  }
  for (const auto& [name, factor] : units_for(q))
    if (unit == name) return v * factor;
  throw UnitError("unknown unit '" + std::string(unit) + "' for " + describe(q));
}

std::vector<double> parse_list(std::string_view text, Quantity q) {
  std::vector<double> out;
  std::string_view s = trim(text);
  if (s.find(':') != std::string_view::npos) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
      if (i == s.size() || s[i] == ':') {
        parts.push_back(s.substr(start, i - start));
        start = i + 1;
      }
    }
    if (parts.size() != 3) throw UnitError("range '" + std::string(text) + "' must have the form start:stop:step");
    double a = parse_quantity(parts[0], q);
    double b = parse_quantity(parts[1], q);
    double step = parse_quantity(parts[2], q);
    if (!(step > 0.0) || b < a) throw UnitError("range '" + std::string(text) + "' needs start <= stop and step > 0");
    const long n = static_cast<long>(std::floor((b - a) / step * (1.0 + 1e-12) + 1e-9));
    if (n > 100000) throw UnitError("range '" + std::string(text) + "' has too many points");
    for (long i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * step);
    return out;
  }
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',') {
      out.push_back(parse_quantity(s.substr(start, i - start), q));
      start = i + 1;
    }
  }
  return out;
}

std::vector<double> parse_spacing_list(std::string_view text) {
  std::string_view s = trim(text);
  if (std::count(s.begin(), s.end(), ':') != 1) return parse_list(text, Quantity::Length);
  std::size_t colon = s.find(':');
  double a = parse_quantity(s.substr(0, colon), Quantity::Length);
  double b = parse_quantity(s.substr(colon + 1), Quantity::Length);
  if (!(a > 0.0) || b < a) throw UnitError("spacing range '" + std::string(text) + "' needs 0 < start <= stop");
  std::vector<double> out;
  const int lo = static_cast<int>(std::floor(std::log10(a))) - 1;
  const int hi = static_cast<int>(std::ceil(std::log10(b))) + 1;
  for (int e = lo; e <= hi; ++e) {
    for (double mant : {1.0, 2.0, 2.5, 4.0, 5.0}) {
      double v = std::stod(std::to_string(mant) + "e" + std::to_string(e));
      if (v >= a * (1.0 - 1e-9) && v <= b * (1.0 + 1e-9)) out.push_back(v);
    }
  }
  return out;
}

}  // namespace h2kin::cli
