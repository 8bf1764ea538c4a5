#pragma once

#include <cstdint>
#include <limits>

namespace disturb {

/// Simulation time and durations, in integer picoseconds.
using Picos = std::int64_t;

inline constexpr Picos kNever = std::numeric_limits<Picos>::max() / 4;
inline constexpr Picos kDistantPast = -kNever;

constexpr Picos ps(std::int64_t v) { return v; }
constexpr Picos ns(double v) { return static_cast<Picos>(v * 1e3 + (v >= 0 ? 0.5 : -0.5)); }
constexpr Picos us(double v) { return static_cast<Picos>(v * 1e6 + (v >= 0 ? 0.5 : -0.5)); }
constexpr Picos ms(double v) { return static_cast<Picos>(v * 1e9 + (v >= 0 ? 0.5 : -0.5)); }

constexpr double to_ns(Picos t) { return static_cast<double>(t) / 1e3; }
constexpr double to_us(Picos t) { return static_cast<double>(t) / 1e6; }

constexpr Picos ceil_div(Picos a, Picos b) { return (a + b - 1) / b; }

/// Smallest multiple of `step` that is >= t (t >= 0).
constexpr Picos align_up(Picos t, Picos step) { return ceil_div(t, step) * step; }

}  // namespace disturb
