#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "tripod/experiments.hpp"

// Line-oriented `key = value` configuration with optional [section]
// headers ([physics], [numeric], [run]). Omitted keys fall back to the
// default parameter set. Unknown sections or keys are rejected.

namespace tripod {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    // [physics]
    double b_field_gauss = 0.3;
    double g_factor = 0.5;
    bool larmor_override = false;  // set via larmor_mhz
    double larmor_mhz = 0.0;       // Larmor frequency / 2*pi (MHz)
    double delta_w_pi = 0.5;
    double tau_ns = 380.0;
    double tau2_us = 3.4;
    double t0_us = 90.0;
    double eta_store = 0.1;
    double phi_pi = 0.3;          // fixed read-phase offset of the fig5 sweep
    double probe_fwhm_ns = 100.0;
    double probe_energy = 1.0;
    double fig5_tmin_us = 0.38;
    double fig5_tmax_us = 100.0;

    // [numeric]
    double gn_mhz = 50.0;          // g*sqrt(N) / 2*pi (MHz)
    double gamma_e_mhz = 5.746;    // excited-state decay / 2*pi (MHz)
    double optical_depth = 400.0;
    double omega_write_mhz = 12.0;
    double omega_read_mhz = 70.0;
    double ramp_ns = 60.0;
    double read_plateau_ns = 140.0;
    double probe_peak_ns = 350.0;
    int nz = 1;
    double dt_ps = 0.0;  // 0 = choose from the stability bound

    // [run]
    std::string out_dir;
    std::uint64_t seed = 20100938;
    int points = 0;  // 0 = per-command default
    Engine engine = Engine::analytic;
    int cases = 24;  // oracle-check configurations

    ScenarioParams to_scenario() const;

    // Canonical `key = value` rendering of every resolved setting, used
    // for reproducible output headers.
    std::string resolved_text() const;
};

RunConfig parse_config(std::string_view text);
RunConfig load_config_file(const std::string& path);

std::string engine_name(Engine engine);
Engine parse_engine(std::string_view name);

}  // namespace tripod
