#include "tripod/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace tripod {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(int line, std::string_view key, const std::string& what) {
    std::ostringstream msg;
    msg << "config error at line " << line;
    if (!key.empty()) msg << ", key '" << key << "'";
    msg << ": " << what;
    throw ConfigError(msg.str());
}

double parse_double(int line, std::string_view key, std::string_view value) {
    double out = 0.0;
    const char* begin = value.data();
    const char* end = begin + value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr != end) fail(line, key, "malformed number");
    return out;
}

long parse_int(int line, std::string_view key, std::string_view value) {
    long out = 0;
    const char* begin = value.data();
    const char* end = begin + value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr != end) fail(line, key, "malformed integer");
    return out;
}

}  // namespace

std::string engine_name(Engine engine) {
    switch (engine) {
        case Engine::analytic: return "analytic";
        case Engine::numeric: return "numeric";
        case Engine::both: return "both";
    }
    return "analytic";
}

Engine parse_engine(std::string_view name) {
    if (name == "analytic") return Engine::analytic;
    if (name == "numeric") return Engine::numeric;
    if (name == "both") return Engine::both;
    throw ConfigError("unknown engine '" + std::string(name) +
                      "' (expected analytic, numeric or both)");
}

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;

    using Setter = std::function<void(int, std::string_view, std::string_view)>;
    const auto non_negative = [](double v) { return v >= 0.0; };
    const auto positive = [](double v) { return v > 0.0; };

    auto set_double = [&](double* slot, bool (*check)(double), const char* what) {
        return Setter([slot, check, what](int line, std::string_view key,
                                          std::string_view value) {
            const double v = parse_double(line, key, value);
            if (check && !check(v)) fail(line, key, what);
            *slot = v;
        });
    };

    std::map<std::string, Setter, std::less<>> keys;
    keys["b_field_gauss"] =
        set_double(&cfg.b_field_gauss, non_negative, "field must be non-negative");
    keys["g_factor"] = set_double(&cfg.g_factor, nullptr, "");
    keys["larmor_mhz"] = Setter([&cfg](int line, std::string_view key, std::string_view value) {
        const double v = parse_double(line, key, value);
        if (v < 0.0) fail(line, key, "Larmor frequency must be non-negative");
        cfg.larmor_mhz = v;
        cfg.larmor_override = true;
    });
    keys["delta_w_pi"] = set_double(&cfg.delta_w_pi, nullptr, "");
    keys["tau_ns"] = set_double(&cfg.tau_ns, non_negative, "duration must be non-negative");
    keys["tau2_us"] = set_double(&cfg.tau2_us, non_negative, "duration must be non-negative");
    keys["t0_us"] = set_double(&cfg.t0_us, positive, "lifetime must be positive");
    keys["eta_store"] =
        set_double(&cfg.eta_store, non_negative, "efficiency must be non-negative");
    keys["phi_pi"] = set_double(&cfg.phi_pi, nullptr, "");
    keys["probe_fwhm_ns"] =
        set_double(&cfg.probe_fwhm_ns, positive, "pulse width must be positive");
    keys["probe_energy"] =
        set_double(&cfg.probe_energy, non_negative, "energy must be non-negative");
    keys["fig5_tmin_us"] =
        set_double(&cfg.fig5_tmin_us, positive, "time must be positive");
    keys["fig5_tmax_us"] =
        set_double(&cfg.fig5_tmax_us, positive, "time must be positive");
    keys["gn_mhz"] = set_double(&cfg.gn_mhz, positive, "coupling must be positive");
    keys["gamma_e_mhz"] = set_double(&cfg.gamma_e_mhz, positive, "decay must be positive");
    keys["optical_depth"] =
        set_double(&cfg.optical_depth, non_negative, "optical depth must be non-negative");
    keys["omega_write_mhz"] =
        set_double(&cfg.omega_write_mhz, positive, "Rabi magnitude must be positive");
    keys["omega_read_mhz"] =
        set_double(&cfg.omega_read_mhz, positive, "Rabi magnitude must be positive");
    keys["ramp_ns"] = set_double(&cfg.ramp_ns, positive, "ramp width must be positive");
    keys["read_plateau_ns"] =
        set_double(&cfg.read_plateau_ns, non_negative, "duration must be non-negative");
    keys["probe_peak_ns"] =
        set_double(&cfg.probe_peak_ns, positive, "time must be positive");
    keys["dt_ps"] = set_double(&cfg.dt_ps, non_negative, "step must be non-negative");
    keys["nz"] = Setter([&cfg](int line, std::string_view key, std::string_view value) {
        const long v = parse_int(line, key, value);
        if (v < 1) fail(line, key, "nz must be >= 1");
        cfg.nz = static_cast<int>(v);
    });
    keys["seed"] = Setter([&cfg](int line, std::string_view key, std::string_view value) {
        const long v = parse_int(line, key, value);
        if (v < 0) fail(line, key, "seed must be non-negative");
        cfg.seed = static_cast<std::uint64_t>(v);
    });
    keys["points"] = Setter([&cfg](int line, std::string_view key, std::string_view value) {
        const long v = parse_int(line, key, value);
        if (v < 0) fail(line, key, "points must be non-negative");
        cfg.points = static_cast<int>(v);
    });
    keys["cases"] = Setter([&cfg](int line, std::string_view key, std::string_view value) {
        const long v = parse_int(line, key, value);
        if (v < 1) fail(line, key, "cases must be >= 1");
        cfg.cases = static_cast<int>(v);
    });
    keys["out_dir"] = Setter([&cfg](int, std::string_view, std::string_view value) {
        cfg.out_dir = std::string(value);
    });
    keys["engine"] = Setter([&cfg](int line, std::string_view key, std::string_view value) {
        try {
            cfg.engine = parse_engine(value);
        } catch (const ConfigError& e) {
            fail(line, key, e.what());
        }
    });

    int line_number = 0;
    std::string_view rest = text;
    while (!rest.empty() || line_number == 0) {
        const auto newline = rest.find('\n');
        std::string_view line = newline == std::string_view::npos ? rest : rest.substr(0, newline);
        rest = newline == std::string_view::npos ? std::string_view{} : rest.substr(newline + 1);
        ++line_number;

        const auto comment = line.find('#');
        if (comment != std::string_view::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) {
            if (newline == std::string_view::npos) break;
            continue;
        }

        if (line.front() == '[') {
            if (line.back() != ']') fail(line_number, "", "unterminated section header");
            const std::string_view section = trim(line.substr(1, line.size() - 2));
            if (section != "physics" && section != "numeric" && section != "run")
                fail(line_number, "", "unknown section '" + std::string(section) + "'");
            if (newline == std::string_view::npos) break;
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            fail(line_number, "", "expected 'key = value'");
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) fail(line_number, "", "missing key");
        const auto it = keys.find(key);
        if (it == keys.end()) fail(line_number, key, "unknown key");
        if (value.empty()) fail(line_number, key, "missing value");
        it->second(line_number, key, value);

        if (newline == std::string_view::npos) break;
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

ScenarioParams RunConfig::to_scenario() const {
    ScenarioParams p;
    if (larmor_override)
        p.env = MagneticEnvironment::from_larmor(two_pi * larmor_mhz * 1e6, g_factor);
    else
        p.env = MagneticEnvironment{b_field_gauss, g_factor};
    p.delta_w = delta_w_pi * pi;
    p.tau1 = tau_ns * 1e-9;
    p.tau2 = tau2_us * 1e-6;
    p.t0 = t0_us * 1e-6;
    p.eta_store = eta_store;
    p.fig5_phi = phi_pi * pi;
    p.probe = ProbePulse{probe_fwhm_ns * 1e-9, probe_energy, 0.0};
    p.numeric.atoms.gn = two_pi * gn_mhz * 1e6;
    p.numeric.atoms.gamma_e = two_pi * gamma_e_mhz * 1e6;
    p.numeric.atoms.t0 = p.t0;
    p.numeric.atoms.optical_depth = optical_depth;
    p.numeric.omega_write = two_pi * omega_write_mhz * 1e6;
    p.numeric.omega_read = two_pi * omega_read_mhz * 1e6;
    p.numeric.ramp_width = ramp_ns * 1e-9;
    p.numeric.read_plateau = read_plateau_ns * 1e-9;
    p.numeric.probe_peak = probe_peak_ns * 1e-9;
    p.numeric.nz = nz;
    p.numeric.dt = dt_ps * 1e-12;
    return p;
}

std::string RunConfig::resolved_text() const {
    std::ostringstream out;
    out.precision(17);
    out << "[physics]\n";
    out << "b_field_gauss = " << b_field_gauss << "\n";
    out << "g_factor = " << g_factor << "\n";
    if (larmor_override) out << "larmor_mhz = " << larmor_mhz << "\n";
    out << "delta_w_pi = " << delta_w_pi << "\n";
    out << "tau_ns = " << tau_ns << "\n";
    out << "tau2_us = " << tau2_us << "\n";
    out << "t0_us = " << t0_us << "\n";
    out << "eta_store = " << eta_store << "\n";
    out << "phi_pi = " << phi_pi << "\n";
    out << "probe_fwhm_ns = " << probe_fwhm_ns << "\n";
    out << "probe_energy = " << probe_energy << "\n";
    out << "fig5_tmin_us = " << fig5_tmin_us << "\n";
    out << "fig5_tmax_us = " << fig5_tmax_us << "\n";
    out << "[numeric]\n";
    out << "gn_mhz = " << gn_mhz << "\n";
    out << "gamma_e_mhz = " << gamma_e_mhz << "\n";
    out << "optical_depth = " << optical_depth << "\n";
    out << "omega_write_mhz = " << omega_write_mhz << "\n";
    out << "omega_read_mhz = " << omega_read_mhz << "\n";
    out << "ramp_ns = " << ramp_ns << "\n";
    out << "read_plateau_ns = " << read_plateau_ns << "\n";
    out << "probe_peak_ns = " << probe_peak_ns << "\n";
    out << "nz = " << nz << "\n";
    out << "dt_ps = " << dt_ps << "\n";
    out << "[run]\n";
    out << "seed = " << seed << "\n";
    out << "points = " << points << "\n";
    out << "engine = " << engine_name(engine) << "\n";
    out << "cases = " << cases << "\n";
    return out.str();
}

}  // namespace tripod
