#pragma once

namespace h2kin {

/// Universal gas constant, J/(mol K).
inline constexpr double kGasConstant = 8.314462618;
/// Thermochemical calorie, J.
inline constexpr double kCalorie = 4.184;
inline constexpr double kOneAtmosphere = 101325.0;
/// Standard-state pressure for equilibrium constants, Pa.
inline constexpr double kReferencePressure = kOneAtmosphere;

}  // namespace h2kin
