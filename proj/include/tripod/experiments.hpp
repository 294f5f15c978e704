#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tripod/beams.hpp"
#include "tripod/dynamics.hpp"
#include "tripod/probe.hpp"

// Scenario runners assembling the closed-form engine and the time-domain
// oracle into the figure-level experiments: single-channel reference and
// two-beam enhancement, destructive readout with delayed recovery, read
// phase sweeps, storage-time sweeps with and without Larmor compensation,
// and the channel-isolation check.

namespace tripod {

enum class Engine { analytic, numeric, both };

// Knobs of the time-domain oracle. Defaults put it deep in the adiabatic
// regime (large optical depth, fast readout) where it should agree with
// the closed-form engine at the percent level.
struct NumericParams {
    AtomParams atoms{};
    double omega_write = two_pi * 12e6;  // per-beam write Rabi magnitude (rad/s)
    double omega_read = two_pi * 70e6;   // per-beam read Rabi magnitude (rad/s)
    double ramp_width = 60e-9;           // raised-cosine switching time (s)
    double read_plateau = 140e-9;        // read beams at full power for this long (s)
    double probe_peak = 350e-9;          // probe arrival time in the schedule (s)
    int nz = 1;
    double dt = 0.0;  // 0 = auto from the stability bound
};

struct ScenarioParams {
    MagneticEnvironment env{0.3, 0.5};
    double delta_w = 0.5 * pi;  // relative phase of the write beam components
    double tau1 = 380e-9;       // first readout storage time (s)
    double tau2 = 3.4e-6;       // delayed readout storage time (s)
    double t0 = 90e-6;          // memory lifetime (s)
    double eta_store = 0.1;     // storage efficiency of the closed-form engine
    double fig5_phi = 0.3 * pi; // fixed read-phase offset of the uncompensated sweep
    ProbePulse probe{100e-9, 1.0, 0.0};
    NumericParams numeric{};
};

// One scripted readout event at a given storage time. Beam pairs carry
// unit-scale magnitudes (weights) and phases; the numeric engine rescales
// them to its configured Rabi frequencies.
struct ScheduleEvent {
    double time = 0.0;
    BeamPair pair;
    std::string label;
};

// A complete storage/readout experiment: one write, then a time-ordered
// list of read events, all later than the probe pulse.
struct ExperimentSchedule {
    std::string id;
    BeamPair write;
    ProbePulse probe;
    std::vector<ScheduleEvent> events;
    Engine engine = Engine::analytic;
    double analytic_eta_scale = 1.0;  // storage-efficiency scale of this scenario
    double numeric_report_scale = 1.0;

    void validate() const;
};

// One readout event. Intensities are relative units: the single-channel
// readout extrapolated to zero storage time equals 1. Energies are in
// units of the input pulse energy.
struct ReadoutRecord {
    std::string label;
    double time = 0.0;            // storage time of the event (s)
    double intensity = 0.0;       // relative units
    double energy = 0.0;          // retrieved energy / input energy
    double remaining_norm = 0.0;  // stored norm after the event / input energy
    double total_phase = 0.0;     // Delta, wrapped to [0, 2*pi)
};

struct ScenarioResult {
    std::vector<ReadoutRecord> analytic;
    std::vector<ReadoutRecord> numeric;
    // max |analytic - numeric| intensity difference, in units of the
    // constructive level 2*exp(-t/t0) at the event time.
    double max_discrepancy = 0.0;
};

struct Fig4Row {
    double delta_r = 0.0;
    double first_intensity = 0.0;
    double second_intensity = 0.0;
    double first_energy = 0.0;
    double second_energy = 0.0;
    double corrected_sum = 0.0;  // first + second * exp(+(tau2-tau1)/t0), energy units
};

struct Fig4Result {
    std::vector<Fig4Row> analytic;
    std::vector<Fig4Row> numeric;
    double max_discrepancy = 0.0;
};

struct Fig5Row {
    double t = 0.0;
    double uncompensated = 0.0;  // retrieval efficiency
    double compensated = 0.0;
};

struct Fig5Result {
    std::vector<Fig5Row> analytic;
    std::vector<Fig5Row> numeric;
    double max_discrepancy = 0.0;
};

struct FringeRow {
    double delta_r = 0.0;
    double energy = 0.0;    // retrieved energy / input energy
    double relative = 0.0;  // normalized to the compensated (maximal) readout
};

struct FringeResult {
    std::vector<FringeRow> analytic;
    std::vector<FringeRow> numeric;
    FringeFit analytic_fit;
    FringeFit numeric_fit;
};

struct OracleRow {
    int index = 0;
    double delta_w = 0.0;
    double delta_r = 0.0;
    double tau = 0.0;
    double analytic_relative = 0.0;  // readout normalized to its own Delta=0 level
    double numeric_relative = 0.0;
    double discrepancy = 0.0;
};

struct OracleResult {
    std::vector<OracleRow> rows;
    double max_discrepancy = 0.0;
};

// Runs one schedule through the selected engines and reports per-event
// readout records (plus their discrepancy in both-mode).
ScenarioResult run_schedule(const ScenarioParams& params,
                            const ExperimentSchedule& schedule);

// (a) single-channel reference, (b)/(c) one-beam reads of a two-channel
// store, (d) two-beam read at Delta = 0.
ScenarioResult run_fig2(const ScenarioParams& params, Engine engine);

// (a) destructive first read at tau1 plus recovery read at tau2 with the
// write phases; (b) undisturbed read at tau2 only.
ScenarioResult run_fig3(const ScenarioParams& params, Engine engine);

// First-read intensity versus read phase, with a matched second read that
// retrieves whatever survived the first one.
Fig4Result run_fig4(const ScenarioParams& params, Engine engine,
                    std::span<const double> delta_r_grid);

// Retrieval efficiency versus storage time, with the read phase fixed
// (collapse and revival) and with the read phase tracking the accumulated
// Larmor phase (flat envelope).
Fig5Result run_fig5(const ScenarioParams& params, Engine engine,
                    std::span<const double> times);

// Store in one channel only and read the other; then recover through the
// correct channel.
ScenarioResult run_isolation(const ScenarioParams& params, Engine engine);

// Read-phase sweep of a fixed storage configuration, fitted against the
// cos^2 interference law.
FringeResult run_fringe(const ScenarioParams& params, Engine engine,
                        std::span<const double> delta_r_grid);

// Randomized closed-form/time-domain equivalence suite over (delta_w,
// delta_r, tau) configurations.
OracleResult run_oracle_check(const ScenarioParams& params, int n_cases, std::uint64_t seed);

std::vector<double> uniform_grid(double lo, double hi, int n, bool include_hi = false);

}  // namespace tripod
