#pragma once

#include <cmath>

// Unit conventions: all internal state is angular frequency (rad/s) and
// seconds. External interfaces (configs, CSV, CLI) use MHz, ns and V/cm;
// the conversion happens exactly once, at the config boundary.

namespace afcsim {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;
inline constexpr double ln2 = 0.69314718055994530942;

inline constexpr double mhz_to_rad(double f_mhz) { return two_pi * f_mhz * 1e6; }
inline constexpr double rad_to_mhz(double w) { return w / (two_pi * 1e6); }
inline constexpr double hz_to_rad(double f_hz) { return two_pi * f_hz; }
inline constexpr double rad_to_hz(double w) { return w / two_pi; }
inline constexpr double ns_to_s(double t_ns) { return t_ns * 1e-9; }
inline constexpr double s_to_ns(double t_s) { return t_s * 1e9; }

// 2*sqrt(2 ln2), Gaussian FWHM <-> standard deviation
inline constexpr double fwhm_sigma_ratio = 2.3548200450309493;
inline constexpr double fwhm_to_sigma(double fwhm) { return fwhm / fwhm_sigma_ratio; }
inline constexpr double sigma_to_fwhm(double sigma) { return sigma * fwhm_sigma_ratio; }

// Time-bandwidth product of a transform-limited Gaussian pulse,
// intensity FWHMs: dt * df = 4 ln2 / (2 pi).
inline constexpr double gaussian_time_bandwidth = 4.0 * ln2 / two_pi;

}  // namespace afcsim
