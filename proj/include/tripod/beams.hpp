#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

#include "tripod/angles.hpp"
#include "tripod/constants.hpp"

namespace tripod {

// Channel ordering used throughout: component 0 is the sigma+ channel
// (coupling beam Omega+, spin wave s_ca), component 1 is the sigma-
// channel (Omega-, s_ba).

// One writing or reading event: the two circularly polarized coupling
// components with magnitudes |Omega+-| (rad/s) and phases phi+-.
struct BeamPair {
    double omega_plus_mag = 0.0;
    double omega_minus_mag = 0.0;
    double phi_plus = 0.0;
    double phi_minus = 0.0;

    BeamPair() = default;
    BeamPair(double plus_mag, double minus_mag, double plus_phase, double minus_phase)
        : omega_plus_mag(plus_mag),
          omega_minus_mag(minus_mag),
          phi_plus(plus_phase),
          phi_minus(minus_phase) {
        if (!(plus_mag >= 0.0) || !(minus_mag >= 0.0))
            throw std::invalid_argument("BeamPair: Rabi magnitudes must be >= 0");
    }

    // Two beams of equal magnitude with relative phase delta = phi+ - phi-.
    static BeamPair balanced(double mag, double delta, double minus_phase = 0.0) {
        return {mag, mag, minus_phase + delta, minus_phase};
    }
    static BeamPair plus_only(double mag, double phase = 0.0) { return {mag, 0.0, phase, 0.0}; }
    static BeamPair minus_only(double mag, double phase = 0.0) { return {0.0, mag, 0.0, phase}; }

    // Relative phase delta = phi+ - phi-, wrapped to [0, 2*pi).
    double delta() const { return wrap_angle(phi_plus - phi_minus); }

    // Quadrature sum of the two Rabi magnitudes.
    double total_magnitude() const { return std::hypot(omega_plus_mag, omega_minus_mag); }

    bool has_drive() const { return total_magnitude() > 0.0; }

    // Normalized magnitude weights (w+, w-).
    Eigen::Vector2d weights() const {
        const double w = total_magnitude();
        if (w <= 0.0)
            throw std::invalid_argument("BeamPair: both Rabi magnitudes are zero");
        return {omega_plus_mag / w, omega_minus_mag / w};
    }

    // Unit vector in C^2 selected by this pair: (w+ e^{i phi+}, w- e^{i phi-}).
    // A spin-wave component along this direction couples to the beams
    // (bright); the orthogonal component does not (dark).
    Eigen::Vector2cd bright_direction() const {
        const Eigen::Vector2d w = weights();
        using std::polar;
        return {polar(w[0], phi_plus), polar(w[1], phi_minus)};
    }

    // Complex Rabi frequencies with the e^{-i phi} phase convention.
    std::complex<double> omega_plus() const { return std::polar(omega_plus_mag, -phi_plus); }
    std::complex<double> omega_minus() const { return std::polar(omega_minus_mag, -phi_minus); }
};

// Bias magnetic field along the quantization axis and the Lande factor of
// the storage levels. The Larmor frequency is derived, never stored:
// larmor = g_F * mu_B * B / hbar. Twice this value is the Zeeman splitting
// between the two storage sublevels, so the relative phase of the stored
// spin waves advances at 2*larmor.
struct MagneticEnvironment {
    double b_field_gauss = 0.3;
    double g_factor = 0.5;

    double larmor() const {
        return g_factor * constants::bohr_magneton *
               (b_field_gauss * constants::gauss_to_tesla) / constants::hbar;
    }

    // Convenience: choose B so that larmor() equals the requested value.
    static MagneticEnvironment from_larmor(double larmor_rad_s, double g_factor = 0.5) {
        MagneticEnvironment env;
        env.g_factor = g_factor;
        env.b_field_gauss = larmor_rad_s * constants::hbar /
                            (g_factor * constants::bohr_magneton * constants::gauss_to_tesla);
        return env;
    }
};

}  // namespace tripod
