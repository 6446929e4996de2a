#pragma once

// Unit convention used throughout: angular frequencies and rates in rad/us,
// times in us, drive amplitudes in volts. A linear frequency of f MHz is the
// angular value 2*pi*f rad/us, so integrator steps stay O(1e-4..1e-3) and no
// 2*pi bookkeeping leaks into the dynamics.

namespace photonsim {

inline constexpr double two_pi = 6.283185307179586476925286766559;
inline constexpr double pi_val = 3.1415926535897932384626433832795;

// linear MHz -> angular rad/us
inline constexpr double mhz(double f_mhz) { return two_pi * f_mhz; }

// angular rad/us -> linear MHz
inline constexpr double to_mhz(double w) { return w / two_pi; }

// linear GHz -> angular rad/us
inline constexpr double ghz(double f_ghz) { return two_pi * 1000.0 * f_ghz; }

}  // namespace photonsim
