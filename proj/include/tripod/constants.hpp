#pragma once

namespace tripod::constants {

// CODATA 2018 values, SI units.
inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double planck_h = 6.62607015e-34;    // J s
inline constexpr double bohr_magneton = 9.2740100783e-24;  // J/T

inline constexpr double gauss_to_tesla = 1.0e-4;

}  // namespace tripod::constants
