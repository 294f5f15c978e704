#pragma once

#include <cmath>
#include <stdexcept>

#include "tripod/angles.hpp"

// Closed-form readout and population laws for the two-channel memory,
// for equal-amplitude storage. The recurring argument is the total phase
// difference Delta = delta_r - delta_w + 2*larmor*tau: Delta = 0 gives
// constructive (maximal) readout, Delta = pi destructive (zero) readout.

namespace tripod {

// Total retrieved intensity in units of the single-channel readout:
// 2 cos^2(delta_r/2 - delta_w/2 + larmor*tau). Periodic in delta_r with
// period 2*pi; ranges over [0, 2].
inline double readout_intensity(double delta_r, double delta_w, double larmor, double tau) {
    const double c = std::cos(0.5 * delta_r - 0.5 * delta_w + larmor * tau);
    return 2.0 * c * c;
}

// Retrieval efficiency versus storage time:
// a * [1 + cos(2*larmor*t - phi)] * exp(-t/t0).
inline double retrieval_efficiency(double t, double a, double larmor, double phi, double t0) {
    if (!(t0 > 0.0))
        throw std::invalid_argument("retrieval_efficiency: lifetime t0 must be > 0");
    return a * (1.0 + std::cos(2.0 * larmor * t - phi)) * std::exp(-t / t0);
}

struct PopulationPair {
    double p_plus;
    double p_minus;
};

// Populations of the symmetric/antisymmetric superposition states for an
// equal-amplitude excitation stored with relative phase delta_w: the
// population Rabi-oscillates between them at the Larmor frequency.
inline PopulationPair superposition_populations(double t, double delta_w, double larmor) {
    const double arg = larmor * t - 0.5 * delta_w;
    const double c = std::cos(arg);
    const double s = std::sin(arg);
    return {c * c, s * s};
}

// Population projected onto the superposition basis state selected by a
// read phase delta_r; equals readout_intensity(...) / 2.
inline double projected_population(double delta_r, double delta_w, double larmor, double t) {
    const double c = std::cos(0.5 * delta_r - 0.5 * delta_w + larmor * t);
    return c * c;
}

// Read phase that cancels the accumulated Larmor phase at storage time
// tau (Delta = 0, maximal readout): delta_r = delta_w - 2*larmor*tau,
// wrapped to [0, 2*pi).
inline double compensation_phase(double tau, double larmor, double delta_w) {
    if (!(tau >= 0.0)) throw std::invalid_argument("compensation_phase: tau must be >= 0");
    return wrap_angle(delta_w - 2.0 * larmor * tau);
}

}  // namespace tripod
