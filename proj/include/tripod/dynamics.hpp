#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "tripod/beams.hpp"
#include "tripod/probe.hpp"

// Time-domain integrator for the four-level tripod medium, independent of
// the closed-form model. Single-excitation amplitude equations for the
// optical coherence P (a<->e, driven by the probe envelope), and the two
// spin coherences B (sigma_ba, coupled by Omega-) and C (sigma_ca, coupled
// by Omega+), with symmetric Zeeman detunings +-larmor on the storage
// levels and decay gamma_e on e, 1/(2 t0) on b and c. The slowly varying
// probe envelope is advected through the medium in retarded time; the
// field increment per cell is chosen so that the continuum system
// conserves excitation number exactly when the loss channels are off.

namespace tripod {

struct AtomParams {
    double gn = two_pi * 50e6;       // collective coupling g*sqrt(N) (rad/s)
    double gamma_e = two_pi * 5.746e6;  // excited-state population decay (rad/s)
    double t0 = 90e-6;               // ground coherence lifetime (s)
    double length = 1.0;             // medium length (normalized)
    double optical_depth = 400.0;    // resonant intensity optical depth

    // Field-atom coupling per unit normalized length; the total resonant
    // intensity attenuation across the medium is exp(-optical_depth).
    double field_coupling() const;
    void validate() const;
};

// A beam pair with raised-cosine switching: off before on_time, ramping
// up over [on_time, on_time + ramp_width], flat until off_time, ramping
// down over [off_time, off_time + ramp_width]. Infinite off_time keeps
// the pair on for the rest of the run.
struct BeamRamp {
    BeamPair pair;
    double on_time = 0.0;
    double off_time = 0.0;
    double ramp_width = 1e-9;

    double envelope(double t) const;
    double end_time() const { return off_time + ramp_width; }
    void validate() const;
};

struct SimGrid {
    int nz = 1;           // spatial cells (1 = uniform-medium approximation)
    long nt = 0;          // time steps
    double dt = 0.0;      // step (s)
    double dz = 1.0;      // cell size (normalized)

    double horizon() const { return static_cast<double>(nt) * dt; }
};

// Grid with dt chosen from the stability bound of the fastest rates and
// nt covering the requested horizon.
SimGrid make_grid(const AtomParams& atoms, const MagneticEnvironment& env,
                  std::span<const BeamRamp> beams, double horizon, int nz = 1,
                  double dt_override = 0.0);

struct SimOptions {
    // Check mode: turn off the spontaneous and ground-state loss channels
    // so that atomic excitation plus emitted probe energy is conserved.
    bool closed_system = false;
    // Record every record_stride-th step in the output series (0 = auto).
    long record_stride = 0;
};

struct SimEnergies {
    double input = 0.0;      // integral of |probe_in|^2 dt
    double stored = 0.0;     // atomic norm when the write ramp completes
    double retrieved = 0.0;  // emitted energy from the first read onward
};

struct SimResult {
    Eigen::ArrayXd time;        // recorded sample times (s)
    Eigen::ArrayXcd probe_out;  // output envelope at the medium exit
    Eigen::ArrayXcd sigma_ba;   // collective spin coherence (flat mode)
    Eigen::ArrayXcd sigma_ca;
    Eigen::ArrayXcd sigma_ea;   // collective optical coherence
    SimEnergies energies;
    std::vector<double> read_energies;      // emitted energy per read window
    std::vector<double> read_window_norms;  // atomic norm when each read pulse ends
    double total_emitted = 0.0;             // integral of |probe_out|^2 dt, full run
    double final_norm = 0.0;            // atomic norm at the end of the run
    double peak_excited_population = 0.0;
};

SimResult simulate(const ProbePulse& probe, const BeamRamp& write,
                   std::span<const BeamRamp> reads, const MagneticEnvironment& env,
                   const AtomParams& atoms, const SimGrid& grid,
                   const SimOptions& options = {});

// One storage/readout configuration, rerun by the sweep drivers with
// individual fields replaced.
struct SimSetup {
    ProbePulse probe;
    BeamRamp write;
    BeamRamp read;
    MagneticEnvironment env;
    AtomParams atoms;
    SimGrid grid;
    SimOptions options;
};

SimResult run_setup(const SimSetup& setup);

// Sweep the relative phase of the read pair; returns (delta_r, retrieved
// energy) per grid point.
std::vector<std::pair<double, double>> fringe_scan(const SimSetup& base,
                                                   std::span<const double> delta_r_values);

// Least-squares fit of y = offset + amplitude*cos(k*x + phase) with the
// angular period free; used to verify fringe scans.
struct FringeFit {
    double period = 0.0;      // 2*pi / k
    double offset = 0.0;
    double amplitude = 0.0;   // >= 0
    double phase = 0.0;
    double visibility = 0.0;  // amplitude / offset
    double rms_residual = 0.0;
};

FringeFit fit_fringe(std::span<const double> x, std::span<const double> y);

struct AdiabaticityReport {
    double max_mixing_angle_rate = 0.0;  // max |d theta/dt| / gn over all ramps
    double peak_excited_population = 0.0;
    bool mixing_angle_warning = false;
    bool excited_population_warning = false;
};

AdiabaticityReport adiabaticity_report(const ProbePulse& probe, const BeamRamp& write,
                                       std::span<const BeamRamp> reads,
                                       const MagneticEnvironment& env, const AtomParams& atoms,
                                       const SimGrid& grid, double mixing_angle_threshold = 0.1,
                                       double excited_population_threshold = 0.01);

}  // namespace tripod
