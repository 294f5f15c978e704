#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

#include "tripod/angles.hpp"
#include "tripod/beams.hpp"
#include "tripod/probe.hpp"

// Closed-form model of two-channel light storage in a tripod medium.
//
// A stored excitation is a pair of collective ground-state coherence
// amplitudes (s_ca, s_ba) in C^2. Writing maps the probe amplitude onto
// the direction selected by the write beam pair; a magnetic bias field
// rotates the relative phase of the two components at twice the Larmor
// frequency; reading projects onto the direction selected by the read
// pair and converts exactly that component to light, leaving the
// orthogonal (dark) component stored.

namespace tripod {

// Opaque pulse-shape metadata carried along with a stored state. Readout
// amplitudes do not depend on it.
struct EnvelopeShape {
    double fwhm = 0.0;
    double center = 0.0;
};

struct SpinWaveState {
    Eigen::Vector2cd amps = Eigen::Vector2cd::Zero();  // (s_ca, s_ba)
    EnvelopeShape envelope;
    double elapsed = 0.0;  // total storage time (s)

    std::complex<double> s_ca() const { return amps[0]; }
    std::complex<double> s_ba() const { return amps[1]; }
    double stored_norm() const { return amps.squaredNorm(); }
};

// Mixing angle of the combined light/spin excitation:
// theta = atan(gN / sqrt(|Omega+|^2 + |Omega-|^2)), in [0, pi/2].
// theta = pi/2 (pure spin wave) iff both coupling magnitudes vanish.
inline double mixing_angle(const BeamPair& pair, double collective_coupling) {
    if (!(collective_coupling > 0.0))
        throw std::invalid_argument("mixing_angle: collective coupling must be > 0");
    return std::atan2(collective_coupling, pair.total_magnitude());
}

// Combined light/spin excitation with its mixing angle.
struct PolaritonState {
    std::complex<double> light;
    SpinWaveState spin;
    double theta = 0.0;
};

inline PolaritonState make_polariton(std::complex<double> light, SpinWaveState spin,
                                     const BeamPair& pair, double collective_coupling) {
    return {light, std::move(spin), mixing_angle(pair, collective_coupling)};
}

// Bright amplitude of the state with respect to a beam pair:
// c_B = w+ s_ca e^{-i phi+} + w- s_ba e^{-i phi-}.
inline std::complex<double> compose_spin_wave(const BeamPair& pair, const SpinWaveState& state) {
    if (!pair.has_drive())
        throw std::invalid_argument("compose_spin_wave: beam pair has no drive");
    return pair.bright_direction().dot(state.amps);
}

// Map a probe pulse onto the spin-wave pair selected by the write beams.
// The stored amplitudes are split by the magnitude weights and carry the
// write phases: s_ca ~ w+ e^{i phi_w+}, s_ba ~ w- e^{i phi_w-}, with
// total stored norm eta_store * probe.energy. A zero-energy probe stores
// the zero state.
inline SpinWaveState store(const ProbePulse& probe, const BeamPair& write,
                           double eta_store = 0.1) {
    if (!write.has_drive())
        throw std::invalid_argument("store: write pair has no drive");
    if (!(eta_store >= 0.0))
        throw std::invalid_argument("store: storage efficiency must be >= 0");
    SpinWaveState state;
    state.envelope = {probe.fwhm, probe.center};
    state.amps = std::sqrt(eta_store * probe.energy) * write.bright_direction();
    return state;
}

// Free evolution for a duration tau: the s_ba component advances by the
// full relative Larmor phase 2*larmor*tau while s_ca is phase-stationary,
// and both amplitudes decay at 1/(2 t0) so the stored norm decays as
// exp(-tau/t0). t0 may be infinite.
inline SpinWaveState evolve(const SpinWaveState& state, double tau,
                            const MagneticEnvironment& env, double t0) {
    if (!(tau >= 0.0)) throw std::invalid_argument("evolve: tau must be >= 0");
    if (!(t0 > 0.0)) throw std::invalid_argument("evolve: lifetime t0 must be > 0");
    SpinWaveState next = state;
    const double decay = std::exp(-tau / (2.0 * t0));
    next.amps[0] *= decay;
    next.amps[1] *= decay * std::polar(1.0, 2.0 * env.larmor() * tau);
    next.elapsed += tau;
    return next;
}

struct ReadResult {
    std::complex<double> output;  // released optical amplitude
    SpinWaveState remaining;      // dark component, still stored
};

// Projective read: converts the bright component (with respect to the
// read pair) into light and keeps the dark component stored, so
// |output|^2 + remaining.stored_norm() == state.stored_norm().
inline ReadResult read(const SpinWaveState& state, const BeamPair& read_pair) {
    if (!read_pair.has_drive())
        throw std::invalid_argument("read: read pair has no drive");
    const Eigen::Vector2cd bright = read_pair.bright_direction();
    const std::complex<double> output = bright.dot(state.amps);
    ReadResult result{output, state};
    result.remaining.amps = state.amps - output * bright;
    return result;
}

}  // namespace tripod
