#include "tripod/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tripod {

namespace {

constexpr std::complex<double> I{0.0, 1.0};

double ramp_profile(double x) { return 0.5 * (1.0 - std::cos(pi * x)); }

}  // namespace

double AtomParams::field_coupling() const {
    return std::sqrt(optical_depth * gamma_e / (4.0 * length));
}

void AtomParams::validate() const {
    if (!(gn > 0.0)) throw std::invalid_argument("AtomParams: gn must be > 0");
    if (!(gamma_e > 0.0)) throw std::invalid_argument("AtomParams: gamma_e must be > 0");
    if (!(t0 > 0.0)) throw std::invalid_argument("AtomParams: t0 must be > 0");
    if (!(length > 0.0)) throw std::invalid_argument("AtomParams: length must be > 0");
    if (!(optical_depth >= 0.0))
        throw std::invalid_argument("AtomParams: optical depth must be >= 0");
}

double BeamRamp::envelope(double t) const {
    if (t < on_time) return 0.0;
    if (t < on_time + ramp_width) return ramp_profile((t - on_time) / ramp_width);
    if (t <= off_time) return 1.0;
    if (t < off_time + ramp_width) return 1.0 - ramp_profile((t - off_time) / ramp_width);
    return 0.0;
}

void BeamRamp::validate() const {
    if (!(ramp_width > 0.0)) throw std::invalid_argument("BeamRamp: ramp_width must be > 0");
    if (std::isfinite(on_time) && std::isfinite(off_time) && !(off_time > on_time))
        throw std::invalid_argument("BeamRamp: off_time must be later than on_time");
}

SimGrid make_grid(const AtomParams& atoms, const MagneticEnvironment& env,
                  std::span<const BeamRamp> beams, double horizon, int nz,
                  double dt_override) {
    if (nz < 1) throw std::invalid_argument("make_grid: nz must be >= 1");
    if (!(horizon > 0.0)) throw std::invalid_argument("make_grid: horizon must be > 0");
    double omega_max = 0.0;
    double ramp_min = horizon;
    for (const auto& b : beams) {
        omega_max = std::max(omega_max, b.pair.total_magnitude());
        ramp_min = std::min(ramp_min, b.ramp_width);
    }
    const double kappa = atoms.field_coupling();
    const double radiative = kappa * kappa * atoms.length;
    const double rate_max =
        std::max({atoms.gn, atoms.gamma_e, std::abs(env.larmor()), omega_max});
    double dt = dt_override;
    if (dt <= 0.0) {
        dt = 0.05 / rate_max;
        if (radiative > 0.0) dt = std::min(dt, 1.0 / radiative);
        dt = std::min(dt, ramp_min / 25.0);
    }
    SimGrid grid;
    grid.nz = nz;
    grid.dt = dt;
    grid.nt = static_cast<long>(std::ceil(horizon / dt));
    grid.dz = atoms.length / nz;
    return grid;
}

namespace {

struct Schedule {
    const BeamRamp* write;
    std::span<const BeamRamp> reads;

    void control(double t, std::complex<double>& omega_b, std::complex<double>& omega_c) const {
        omega_b = 0.0;
        omega_c = 0.0;
        accumulate(*write, t, omega_b, omega_c);
        for (const auto& r : reads) accumulate(r, t, omega_b, omega_c);
    }

    static void accumulate(const BeamRamp& ramp, double t, std::complex<double>& omega_b,
                           std::complex<double>& omega_c) {
        const double f = ramp.envelope(t);
        if (f <= 0.0) return;
        omega_b += f * ramp.pair.omega_minus();  // sigma- drives b <-> e
        omega_c += f * ramp.pair.omega_plus();   // sigma+ drives c <-> e
    }
};

void validate_schedule(const BeamRamp& write, std::span<const BeamRamp> reads) {
    write.validate();
    double previous_end = write.end_time();
    for (const auto& r : reads) {
        r.validate();
        if (!(previous_end <= r.on_time))
            throw std::runtime_error(
                "simulate: beam ramps overlap; each read must start after the previous "
                "ramp has fully switched off");
        previous_end = r.end_time();
    }
}

}  // namespace

SimResult simulate(const ProbePulse& probe, const BeamRamp& write,
                   std::span<const BeamRamp> reads, const MagneticEnvironment& env,
                   const AtomParams& atoms, const SimGrid& grid, const SimOptions& options) {
    atoms.validate();
    validate_schedule(write, reads);
    if (grid.nz < 1 || grid.nt < 1 || !(grid.dt > 0.0) || !(grid.dz > 0.0))
        throw std::invalid_argument("simulate: invalid grid");

    double omega_max = write.pair.total_magnitude();
    for (const auto& r : reads) omega_max = std::max(omega_max, r.pair.total_magnitude());
    const double larmor = env.larmor();
    const double rate_max =
        std::max({atoms.gn, atoms.gamma_e, std::abs(larmor), omega_max});
    const double kappa = atoms.field_coupling();
    const double radiative = kappa * kappa * grid.dz * grid.nz;
    if (grid.dt * rate_max >= 0.1 || grid.dt * radiative >= 2.0) {
        std::ostringstream msg;
        msg << "simulate: unstable grid: dt=" << grid.dt << " s, dt*max_rate="
            << grid.dt * rate_max << " (must be < 0.1), dt*radiative_rate="
            << grid.dt * radiative << " (must be < 2)";
        throw std::runtime_error(msg.str());
    }

    const int nz = grid.nz;
    const double dt = grid.dt;
    const double dz = grid.dz;
    const double gamma_p = options.closed_system ? 0.0 : 0.5 * atoms.gamma_e;
    const double gamma_0 = options.closed_system ? 0.0 : 0.5 / atoms.t0;
    const Schedule schedule{&write, reads};

    using Arr = Eigen::ArrayXcd;
    Arr p = Arr::Zero(nz), b = Arr::Zero(nz), c = Arr::Zero(nz);
    Arr dp(nz), db(nz), dc(nz);
    Arr kp1(nz), kb1(nz), kc1(nz), kp2(nz), kb2(nz), kc2(nz);
    Arr kp3(nz), kb3(nz), kc3(nz), kp4(nz), kb4(nz), kc4(nz);
    Arr tp(nz), tb(nz), tc(nz);

    // Marches the field through the cells and fills the time derivatives.
    // The per-cell field increment uses the midpoint of the cell so that
    // field flux and atomic norm balance exactly.
    auto rhs = [&](double t, const Arr& P, const Arr& B, const Arr& C, Arr& dP, Arr& dB,
                   Arr& dC) -> std::complex<double> {
        std::complex<double> omega_b, omega_c;
        schedule.control(t, omega_b, omega_c);
        const std::complex<double> omega_b_conj = std::conj(omega_b);
        const std::complex<double> omega_c_conj = std::conj(omega_c);
        std::complex<double> u = probe.amplitude(t);
        for (int j = 0; j < nz; ++j) {
            const std::complex<double> increment = I * (kappa * dz) * P[j];
            const std::complex<double> u_mid = u + 0.5 * increment;
            dP[j] = -gamma_p * P[j] + I * kappa * u_mid + I * (omega_b * B[j] + omega_c * C[j]);
            dB[j] = std::complex<double>(-gamma_0, larmor) * B[j] + I * omega_b_conj * P[j];
            dC[j] = std::complex<double>(-gamma_0, -larmor) * C[j] + I * omega_c_conj * P[j];
            u += increment;
        }
        return u;  // field at the medium exit
    };

    const long nt = grid.nt;
    long stride = options.record_stride;
    if (stride <= 0) stride = std::max(1L, nt / 200000L);
    const long n_records = nt / stride + 1;

    SimResult result;
    result.time.resize(n_records);
    result.probe_out.resize(n_records);
    result.sigma_ba.resize(n_records);
    result.sigma_ca.resize(n_records);
    result.sigma_ea.resize(n_records);
    result.read_energies.assign(reads.size(), 0.0);
    result.read_window_norms.assign(reads.size(), 0.0);
    std::size_t next_norm_capture = 0;

    const double flat_weight = dz / std::sqrt(dz * nz);
    bool stored_captured = false;
    const double store_time = write.end_time();
    double in_prev = std::norm(probe.amplitude(0.0));
    std::complex<double> out_now = rhs(0.0, p, b, c, dp, db, dc);
    double out_prev = std::norm(out_now);
    long record_index = 0;

    auto record = [&](long n, std::complex<double> exit_field) {
        result.time[record_index] = n * dt;
        result.probe_out[record_index] = exit_field;
        result.sigma_ba[record_index] = b.sum() * flat_weight;
        result.sigma_ca[record_index] = c.sum() * flat_weight;
        result.sigma_ea[record_index] = p.sum() * flat_weight;
        ++record_index;
    };
    record(0, out_now);

    auto window_of = [&](double t) -> long {
        long w = -1;
        for (std::size_t i = 0; i < reads.size(); ++i)
            if (t >= reads[i].on_time) w = static_cast<long>(i);
        return w;
    };

    for (long n = 0; n < nt; ++n) {
        const double t = n * dt;

        // Classical RK4 with the field slaved to the atomic state per stage.
        rhs(t, p, b, c, kp1, kb1, kc1);
        tp = p + 0.5 * dt * kp1;
        tb = b + 0.5 * dt * kb1;
        tc = c + 0.5 * dt * kc1;
        rhs(t + 0.5 * dt, tp, tb, tc, kp2, kb2, kc2);
        tp = p + 0.5 * dt * kp2;
        tb = b + 0.5 * dt * kb2;
        tc = c + 0.5 * dt * kc2;
        rhs(t + 0.5 * dt, tp, tb, tc, kp3, kb3, kc3);
        tp = p + dt * kp3;
        tb = b + dt * kb3;
        tc = c + dt * kc3;
        rhs(t + dt, tp, tb, tc, kp4, kb4, kc4);
        p += (dt / 6.0) * (kp1 + 2.0 * kp2 + 2.0 * kp3 + kp4);
        b += (dt / 6.0) * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4);
        c += (dt / 6.0) * (kc1 + 2.0 * kc2 + 2.0 * kc3 + kc4);

        const double t_next = (n + 1) * dt;
        out_now = rhs(t_next, p, b, c, dp, db, dc);

        const double in_next = std::norm(probe.amplitude(t_next));
        result.energies.input += 0.5 * (in_prev + in_next) * dt;
        in_prev = in_next;

        const double out_next = std::norm(out_now);
        const double slice = 0.5 * (out_prev + out_next) * dt;
        result.total_emitted += slice;
        const long w = window_of(t + 0.5 * dt);
        if (w >= 0) result.read_energies[static_cast<std::size_t>(w)] += slice;
        out_prev = out_next;

        const double excited = (p.abs2().sum()) * dz;
        result.peak_excited_population = std::max(result.peak_excited_population, excited);

        if (!stored_captured && t_next >= store_time) {
            result.energies.stored = (b.abs2().sum() + c.abs2().sum()) * dz;
            stored_captured = true;
        }
        while (next_norm_capture < reads.size() &&
               t_next >= reads[next_norm_capture].end_time()) {
            result.read_window_norms[next_norm_capture] =
                (p.abs2().sum() + b.abs2().sum() + c.abs2().sum()) * dz;
            ++next_norm_capture;
        }
        if ((n + 1) % stride == 0 && record_index < n_records) record(n + 1, out_now);
    }

    if (!stored_captured)
        result.energies.stored = (b.abs2().sum() + c.abs2().sum()) * dz;
    for (; next_norm_capture < reads.size(); ++next_norm_capture)
        result.read_window_norms[next_norm_capture] =
            (p.abs2().sum() + b.abs2().sum() + c.abs2().sum()) * dz;
    result.time.conservativeResize(record_index);
    result.probe_out.conservativeResize(record_index);
    result.sigma_ba.conservativeResize(record_index);
    result.sigma_ca.conservativeResize(record_index);
    result.sigma_ea.conservativeResize(record_index);
    result.final_norm = (p.abs2().sum() + b.abs2().sum() + c.abs2().sum()) * dz;
    for (double e : result.read_energies) result.energies.retrieved += e;
    return result;
}

SimResult run_setup(const SimSetup& setup) {
    const BeamRamp reads[] = {setup.read};
    return simulate(setup.probe, setup.write, reads, setup.env, setup.atoms, setup.grid,
                    setup.options);
}

std::vector<std::pair<double, double>> fringe_scan(const SimSetup& base,
                                                   std::span<const double> delta_r_values) {
    std::vector<std::pair<double, double>> out;
    out.reserve(delta_r_values.size());
    for (double delta_r : delta_r_values) {
        if (!std::isfinite(delta_r))
            throw std::invalid_argument("fringe_scan: delta_r must be finite");
        SimSetup setup = base;
        setup.read.pair.phi_plus = setup.read.pair.phi_minus + delta_r;
        const SimResult result = run_setup(setup);
        out.emplace_back(delta_r, result.read_energies.at(0));
    }
    return out;
}

namespace {

double fringe_sse(std::span<const double> x, std::span<const double> y, double k,
                  Eigen::Vector3d* coeffs = nullptr) {
    Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
    Eigen::Vector3d atb = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const Eigen::Vector3d row{1.0, std::cos(k * x[i]), std::sin(k * x[i])};
        ata += row * row.transpose();
        atb += row * y[i];
    }
    const Eigen::Vector3d beta = ata.ldlt().solve(atb);
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double model = beta[0] + beta[1] * std::cos(k * x[i]) + beta[2] * std::sin(k * x[i]);
        sse += (y[i] - model) * (y[i] - model);
    }
    if (coeffs) *coeffs = beta;
    return sse;
}

}  // namespace

FringeFit fit_fringe(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 5)
        throw std::invalid_argument("fit_fringe: need at least 5 samples");

    double best_k = 1.0;
    double best_sse = std::numeric_limits<double>::infinity();
    for (double k = 0.5; k <= 1.5 + 1e-12; k += 1e-3) {
        const double sse = fringe_sse(x, y, k);
        if (sse < best_sse) {
            best_sse = sse;
            best_k = k;
        }
    }
    // Golden-section refinement around the best coarse value.
    double lo = best_k - 2e-3, hi = best_k + 2e-3;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double k1 = hi - gr * (hi - lo), k2 = lo + gr * (hi - lo);
    double f1 = fringe_sse(x, y, k1), f2 = fringe_sse(x, y, k2);
    for (int it = 0; it < 80; ++it) {
        if (f1 < f2) {
            hi = k2;
            k2 = k1;
            f2 = f1;
            k1 = hi - gr * (hi - lo);
            f1 = fringe_sse(x, y, k1);
        } else {
            lo = k1;
            k1 = k2;
            f1 = f2;
            k2 = lo + gr * (hi - lo);
            f2 = fringe_sse(x, y, k2);
        }
    }
    const double k = 0.5 * (lo + hi);

    Eigen::Vector3d beta;
    const double sse = fringe_sse(x, y, k, &beta);
    FringeFit fit;
    fit.period = two_pi / k;
    fit.offset = beta[0];
    fit.amplitude = std::hypot(beta[1], beta[2]);
    fit.phase = std::atan2(-beta[2], beta[1]);
    fit.visibility = fit.offset > 0.0 ? fit.amplitude / fit.offset : 0.0;
    fit.rms_residual = std::sqrt(sse / static_cast<double>(x.size()));
    return fit;
}

AdiabaticityReport adiabaticity_report(const ProbePulse& probe, const BeamRamp& write,
                                       std::span<const BeamRamp> reads,
                                       const MagneticEnvironment& env, const AtomParams& atoms,
                                       const SimGrid& grid, double mixing_angle_threshold,
                                       double excited_population_threshold) {
    atoms.validate();
    AdiabaticityReport report;

    // d(theta)/dt along a switching edge, from the analytic envelope slope.
    auto scan_ramp = [&](const BeamRamp& ramp) {
        const double mag = ramp.pair.total_magnitude();
        if (mag <= 0.0) return;
        const int samples = 2001;
        auto scan_edge = [&](double start, bool rising) {
            if (!std::isfinite(start)) return;
            for (int i = 0; i <= samples; ++i) {
                const double x = static_cast<double>(i) / samples;
                const double w = mag * (rising ? ramp_profile(x) : 1.0 - ramp_profile(x));
                const double slope =
                    mag * 0.5 * pi / ramp.ramp_width * std::sin(pi * x);
                const double theta_rate =
                    atoms.gn * slope / (atoms.gn * atoms.gn + w * w);
                report.max_mixing_angle_rate =
                    std::max(report.max_mixing_angle_rate, std::abs(theta_rate) / atoms.gn);
            }
        };
        scan_edge(ramp.on_time, true);
        scan_edge(ramp.off_time, false);
    };
    scan_ramp(write);
    for (const auto& r : reads) scan_ramp(r);

    const SimResult sim = simulate(probe, write, reads, env, atoms, grid);
    report.peak_excited_population = sim.peak_excited_population;
    report.mixing_angle_warning = report.max_mixing_angle_rate > mixing_angle_threshold;
    report.excited_population_warning =
        report.peak_excited_population > excited_population_threshold;
    return report;
}

}  // namespace tripod
