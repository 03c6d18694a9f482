#pragma once

#include <numbers>

namespace vortex {

inline constexpr double pi = std::numbers::pi;
inline constexpr double speed_of_light = 299792458.0; // m/s

// Everything internal is SI (m, W, Hz, rad). These literals exist so that
// interface and test code can quote values in the units lab notes use.
namespace units {

constexpr double operator""_m(long double v) { return double(v); }
constexpr double operator""_cm(long double v) { return double(v) * 1e-2; }
constexpr double operator""_mm(long double v) { return double(v) * 1e-3; }
constexpr double operator""_um(long double v) { return double(v) * 1e-6; }
constexpr double operator""_nm(long double v) { return double(v) * 1e-9; }
constexpr double operator""_W(long double v) { return double(v); }
constexpr double operator""_mW(long double v) { return double(v) * 1e-3; }
constexpr double operator""_uW(long double v) { return double(v) * 1e-6; }
constexpr double operator""_Hz(long double v) { return double(v); }
constexpr double operator""_kHz(long double v) { return double(v) * 1e3; }
constexpr double operator""_MHz(long double v) { return double(v) * 1e6; }
constexpr double operator""_GHz(long double v) { return double(v) * 1e9; }
constexpr double operator""_deg(long double v) { return double(v) * pi / 180.0; }

constexpr double operator""_m(unsigned long long v) { return double(v); }
constexpr double operator""_cm(unsigned long long v) { return double(v) * 1e-2; }
constexpr double operator""_mm(unsigned long long v) { return double(v) * 1e-3; }
constexpr double operator""_um(unsigned long long v) { return double(v) * 1e-6; }
constexpr double operator""_nm(unsigned long long v) { return double(v) * 1e-9; }
constexpr double operator""_W(unsigned long long v) { return double(v); }
constexpr double operator""_mW(unsigned long long v) { return double(v) * 1e-3; }
constexpr double operator""_uW(unsigned long long v) { return double(v) * 1e-6; }
constexpr double operator""_Hz(unsigned long long v) { return double(v); }
constexpr double operator""_kHz(unsigned long long v) { return double(v) * 1e3; }
constexpr double operator""_MHz(unsigned long long v) { return double(v) * 1e6; }
constexpr double operator""_GHz(unsigned long long v) { return double(v) * 1e9; }
constexpr double operator""_deg(unsigned long long v) { return double(v) * pi / 180.0; }

} // namespace units
} // namespace vortex
