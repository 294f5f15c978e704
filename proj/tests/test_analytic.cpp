#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "tripod/angles.hpp"
#include "tripod/beams.hpp"
#include "tripod/probe.hpp"
#include "tripod/readout.hpp"
#include "tripod/spin_wave.hpp"

using namespace tripod;

namespace {

const double larmor_nominal = two_pi * 0.21e6;

SpinWaveState balanced_state(double delta_w, double eta = 0.1) {
    return store(ProbePulse{100e-9, 1.0, 0.0}, BeamPair::balanced(1.0, delta_w), eta);
}

}  // namespace

TEST_CASE("angle wrapping") {
    CHECK(wrap_angle(0.0) == 0.0);
    CHECK(wrap_angle(two_pi) == doctest::Approx(0.0));
    CHECK(wrap_angle(-0.5) == doctest::Approx(two_pi - 0.5));
    CHECK(wrap_angle(7.0 * pi) == doctest::Approx(pi));
    CHECK(angle_difference(0.1, two_pi - 0.1) == doctest::Approx(0.2));
}

TEST_CASE("magnetic environment derives the Larmor frequency from B and g") {
    const MagneticEnvironment env{0.3, 0.5};
    // g_F mu_B B / hbar at 300 mG: 2*pi x 0.2099 MHz, i.e. the quoted
    // 0.21 MHz to within 0.03%.
    CHECK(env.larmor() == doctest::Approx(1319115.0088785277).epsilon(1e-12));
    CHECK(env.larmor() / two_pi == doctest::Approx(0.21e6).epsilon(5e-3));

    const auto from = MagneticEnvironment::from_larmor(larmor_nominal, 0.5);
    CHECK(from.larmor() == doctest::Approx(larmor_nominal).epsilon(1e-12));
}

TEST_CASE("probe pulse energy normalization matches quadrature") {
    const ProbePulse probe{100e-9, 1.7, 350e-9};
    // Independent trapezoid quadrature of |amplitude|^2.
    const int n = 200001;
    const double lo = probe.center - 6 * probe.fwhm, hi = probe.center + 6 * probe.fwhm;
    const double dt = (hi - lo) / (n - 1);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        acc += w * std::norm(probe.amplitude(lo + i * dt)) * dt;
    }
    CHECK(acc == doctest::Approx(1.7).epsilon(1e-9));
    CHECK(std::norm(ProbePulse{100e-9, 0.0, 0.0}.amplitude(0.0)) == 0.0);
}

TEST_CASE("beam pair invariants") {
    CHECK_THROWS_AS(BeamPair(-1.0, 0.0, 0.0, 0.0), std::invalid_argument);
    const BeamPair pair{3.0, 4.0, 1.0, 0.25};
    CHECK(pair.total_magnitude() == doctest::Approx(5.0));
    CHECK(pair.delta() == doctest::Approx(0.75));
    CHECK(pair.weights()[0] == doctest::Approx(0.6));
    CHECK(pair.weights()[1] == doctest::Approx(0.8));
    CHECK(pair.bright_direction().norm() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(BeamPair::balanced(1.0, 0.5).delta() == doctest::Approx(0.5));
    CHECK_FALSE(BeamPair(0.0, 0.0, 0.0, 0.0).has_drive());
}

TEST_CASE("mixing angle") {
    CHECK(mixing_angle(BeamPair(0.0, 0.0, 0.0, 0.0), 1e7) == doctest::Approx(0.5 * pi));
    CHECK(mixing_angle(BeamPair::balanced(1e7 / std::sqrt(2.0), 0.0), 1e7) ==
          doctest::Approx(0.25 * pi));
    // |Omega+| = 3, |Omega-| = 4, gN = 5: theta = atan(5/5) = pi/4.
    CHECK(mixing_angle(BeamPair(3.0, 4.0, 0.0, 0.0), 5.0) ==
          doctest::Approx(0.7853981633974483).epsilon(1e-15));
    CHECK_THROWS_AS(mixing_angle(BeamPair::balanced(1.0, 0.0), 0.0), std::invalid_argument);

    // Monotone growth toward pi/2 as the coupling magnitudes shrink.
    double previous = 0.0;
    for (double mag = 8.0; mag >= 0.125; mag /= 2.0) {
        const double theta = mixing_angle(BeamPair::balanced(mag, 0.0), 1.0);
        CHECK(theta > previous);
        previous = theta;
    }
    const auto polariton = make_polariton({1.0, 0.0}, SpinWaveState{}, BeamPair::balanced(1.0, 0.0), 2.0);
    CHECK(polariton.theta > 0.0);
    CHECK(polariton.theta < 0.5 * pi);
}

TEST_CASE("compose_spin_wave bright amplitude") {
    SpinWaveState state;
    state.amps << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);

    CHECK(std::abs(compose_spin_wave(BeamPair::balanced(1.0, 0.0), state)) ==
          doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(compose_spin_wave(BeamPair(1.0, 1.0, pi, 0.0), state)) ==
          doctest::Approx(0.0).epsilon(1e-15));

    SpinWaveState plus_only;
    plus_only.amps << 1.0, 0.0;
    CHECK(std::abs(compose_spin_wave(BeamPair::minus_only(1.0), plus_only)) == 0.0);
    CHECK_THROWS_AS(compose_spin_wave(BeamPair(0.0, 0.0, 0.0, 0.0), state),
                    std::invalid_argument);
}

TEST_CASE("store splits the probe between the channels") {
    const ProbePulse probe{100e-9, 1.0, 0.0};

    SUBCASE("equal write magnitudes") {
        const auto state = store(probe, BeamPair::balanced(1.0, 0.5 * pi), 0.1);
        CHECK(std::norm(state.s_ca()) == doctest::Approx(0.05).epsilon(1e-12));
        CHECK(std::norm(state.s_ba()) == doctest::Approx(0.05).epsilon(1e-12));
        CHECK(std::abs(state.s_ca()) == doctest::Approx(std::abs(state.s_ba())));
        CHECK(state.stored_norm() == doctest::Approx(0.1).epsilon(1e-12));
        CHECK(state.elapsed == 0.0);
        // Phases carried from the write beams.
        CHECK(std::arg(state.s_ca()) == doctest::Approx(0.5 * pi));
        CHECK(std::arg(state.s_ba()) == doctest::Approx(0.0));
        // The pulse shape rides along as metadata.
        CHECK(state.envelope.fwhm == probe.fwhm);
        CHECK(state.envelope.center == probe.center);
    }
    SUBCASE("zero-energy probe stores the zero state") {
        const auto state = store(ProbePulse{100e-9, 0.0, 0.0}, BeamPair::balanced(1.0, 0.0));
        CHECK(state.stored_norm() == 0.0);
    }
    SUBCASE("single-channel write stores one channel only") {
        const auto state = store(probe, BeamPair::plus_only(1.0, 0.3), 0.1);
        CHECK(state.s_ba() == std::complex<double>(0.0, 0.0));
        CHECK(std::norm(state.s_ca()) == doctest::Approx(0.1).epsilon(1e-12));
    }
    SUBCASE("invalid writes") {
        CHECK_THROWS_AS(store(probe, BeamPair(0.0, 0.0, 0.0, 0.0)), std::invalid_argument);
    }
}

TEST_CASE("evolve applies Larmor phase and decay") {
    const double inf = std::numeric_limits<double>::infinity();

    SUBCASE("identity when larmor = 0 and t0 infinite") {
        const auto state = balanced_state(0.5 * pi);
        const auto after = evolve(state, 1e-6, MagneticEnvironment{0.0, 0.5}, inf);
        CHECK((after.amps - state.amps).norm() == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(after.elapsed == doctest::Approx(1e-6));
    }
    SUBCASE("relative phase 2*larmor*tau lands on s_ba") {
        const auto env = MagneticEnvironment::from_larmor(larmor_nominal);
        const auto state = balanced_state(0.5 * pi);
        const auto after = evolve(state, 380e-9, env, inf);
        const double phase =
            std::arg(after.s_ba() / state.s_ba()) - std::arg(after.s_ca() / state.s_ca());
        CHECK(wrap_angle(phase) == doctest::Approx(0.3192 * pi).epsilon(1e-9));
    }
    SUBCASE("full Larmor period restores the relative phase") {
        const auto env = MagneticEnvironment::from_larmor(larmor_nominal);
        const double tau = two_pi / (2.0 * env.larmor());
        const auto state = balanced_state(0.5 * pi);
        const auto after = evolve(state, tau, env, inf);
        CHECK(std::arg(after.s_ba() / after.s_ca()) ==
              doctest::Approx(std::arg(state.s_ba() / state.s_ca())).epsilon(1e-9));
    }
    SUBCASE("norm decays as exp(-tau/t0) and is monotone in tau") {
        const auto state = balanced_state(0.5 * pi);
        double previous = state.stored_norm();
        for (double tau : {1e-6, 2e-6, 5e-6, 20e-6}) {
            const auto after = evolve(state, tau, MagneticEnvironment{0.3, 0.5}, 90e-6);
            CHECK(after.stored_norm() ==
                  doctest::Approx(state.stored_norm() * std::exp(-tau / 90e-6)).epsilon(1e-12));
            CHECK(after.stored_norm() < previous);
            previous = after.stored_norm();
        }
    }
    SUBCASE("negative tau rejected") {
        CHECK_THROWS_AS(evolve(balanced_state(0.0), -1e-9, MagneticEnvironment{}, 1e-6),
                        std::invalid_argument);
    }
}

TEST_CASE("projective read") {
    const auto env = MagneticEnvironment::from_larmor(larmor_nominal);
    const double t0 = 90e-6;
    const double tau = 380e-9;
    const double delta_w = 0.5 * pi;

    SUBCASE("Delta = 0 retrieves everything") {
        auto state = evolve(balanced_state(delta_w), tau, env, t0);
        const double delta_r = compensation_phase(tau, env.larmor(), delta_w);
        const auto rr = read(state, BeamPair::balanced(1.0, delta_r));
        CHECK(std::norm(rr.output) == doctest::Approx(state.stored_norm()).epsilon(1e-12));
        CHECK(rr.remaining.stored_norm() == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("Delta = pi retrieves nothing; a later read with the write phases recovers it") {
        auto state = evolve(balanced_state(delta_w), tau, env, t0);
        const double delta_r =
            wrap_angle(compensation_phase(tau, env.larmor(), delta_w) + pi);
        const auto rr = read(state, BeamPair::balanced(1.0, delta_r));
        CHECK(std::norm(rr.output) <= 1e-24);
        CHECK(rr.remaining.stored_norm() == doctest::Approx(state.stored_norm()).epsilon(1e-12));

        // Recover at a time where the write pair itself is compensated.
        const double period = two_pi / (2.0 * env.larmor());
        const auto later = evolve(rr.remaining, period - tau, env, t0);
        const auto recover = read(later, BeamPair::balanced(1.0, delta_w));
        CHECK(std::norm(recover.output) ==
              doctest::Approx(later.stored_norm()).epsilon(1e-9));
    }
    SUBCASE("reading the empty channel returns zero and leaves the state") {
        SpinWaveState state;
        state.amps << 0.0, 0.7;  // s_ba only
        const auto rr = read(state, BeamPair::plus_only(1.0));
        CHECK(rr.output == std::complex<double>(0.0, 0.0));
        CHECK((rr.remaining.amps - state.amps).norm() == 0.0);
    }
    SUBCASE("invalid read pair") {
        CHECK_THROWS_AS(read(balanced_state(0.0), BeamPair(0.0, 0.0, 0.0, 0.0)),
                        std::invalid_argument);
    }
}

TEST_CASE("read conserves energy for random states and pairs") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> phase(0.0, two_pi);
    std::uniform_real_distribution<double> mag(0.0, 2.0);
    for (int i = 0; i < 500; ++i) {
        SpinWaveState state;
        state.amps << std::polar(mag(rng), phase(rng)), std::polar(mag(rng), phase(rng));
        double m_plus = mag(rng), m_minus = mag(rng);
        if (m_plus == 0.0 && m_minus == 0.0) m_plus = 1.0;
        const BeamPair pair{m_plus, m_minus, phase(rng), phase(rng)};
        const auto rr = read(state, pair);
        CHECK(std::norm(rr.output) + rr.remaining.stored_norm() ==
              doctest::Approx(state.stored_norm()).epsilon(1e-12));
        // The remaining component is dark for the same pair.
        CHECK(std::abs(compose_spin_wave(pair, rr.remaining)) <=
              1e-12 * std::sqrt(state.stored_norm() + 1e-300));
    }
}

TEST_CASE("two-beam sum rule: constructive readout doubles the one-beam readout") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> phase(0.0, two_pi);
    for (int i = 0; i < 100; ++i) {
        const double delta_w = phase(rng);
        const auto state = balanced_state(delta_w);
        const auto single = read(state, BeamPair::minus_only(1.0, phase(rng)));
        const auto both = read(state, BeamPair::balanced(1.0, delta_w));
        CHECK(std::norm(both.output) ==
              doctest::Approx(2.0 * std::norm(single.output)).epsilon(1e-12));
    }
}

TEST_CASE("readout intensity law") {
    const double larmor = larmor_nominal;
    // Quoted working point: delta_r = 0.2 pi, delta_w = 0.5 pi,
    // 2*larmor*tau = 0.3 pi gives Delta ~ 0 and twice the single channel.
    CHECK(readout_intensity(0.2 * pi, 0.5 * pi, larmor, 0.15 * pi / larmor) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(readout_intensity(0.5 * pi + pi, 0.5 * pi, 0.0, 0.0) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK(readout_intensity(0.5 * pi + 0.5 * pi, 0.5 * pi, 0.0, 1.0) ==
          doctest::Approx(1.0).epsilon(1e-12));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> phase(0.0, two_pi);
    std::uniform_real_distribution<double> tau(0.0, 5e-6);
    for (int i = 0; i < 200; ++i) {
        const double dr = phase(rng), dw = phase(rng), t = tau(rng);
        // Periodicity in delta_r.
        CHECK(readout_intensity(dr + two_pi, dw, larmor, t) ==
              doctest::Approx(readout_intensity(dr, dw, larmor, t)).epsilon(1e-12));
        // Population identity: intensity = 2 * projected population.
        CHECK(readout_intensity(dr, dw, larmor, t) ==
              doctest::Approx(2.0 * projected_population(dr, dw, larmor, t)).epsilon(1e-12));
    }
}

TEST_CASE("retrieval efficiency fit form") {
    const double a = 0.05, phi = 0.3 * pi, t0 = 90e-6;
    // Frozen from direct evaluation: a*(1+cos(-phi)) at t=0.
    CHECK(retrieval_efficiency(0.0, a, larmor_nominal, phi, t0) ==
          doctest::Approx(0.07938926261462366).epsilon(1e-12));
    // First maximum at t = phi/(2*larmor): envelope 2a*exp(-t/t0).
    const double t_peak = 3.571428571428571e-07;
    CHECK(retrieval_efficiency(t_peak, a, larmor_nominal, phi, t0) ==
          doctest::Approx(0.09960396091471396).epsilon(1e-12));
    // Decayed away at large t.
    CHECK(retrieval_efficiency(5.0, a, larmor_nominal, phi, t0) ==
          doctest::Approx(0.0).epsilon(1e-15));
    CHECK_THROWS_AS(retrieval_efficiency(0.0, a, larmor_nominal, phi, 0.0),
                    std::invalid_argument);
}

TEST_CASE("superposition populations Rabi oscillation") {
    const double delta_w = 0.5 * pi;
    const double larmor = larmor_nominal;

    CHECK(superposition_populations(0.5 * delta_w / larmor, delta_w, larmor).p_plus ==
          doctest::Approx(1.0).epsilon(1e-12));
    const double quarter = (0.5 * pi + 0.5 * delta_w) / larmor;
    CHECK(superposition_populations(quarter, delta_w, larmor).p_minus ==
          doctest::Approx(1.0).epsilon(1e-12));
    const double eighth = (0.25 * pi + 0.5 * delta_w) / larmor;
    CHECK(superposition_populations(eighth, delta_w, larmor).p_plus ==
          doctest::Approx(0.5).epsilon(1e-12));

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> phase(0.0, two_pi);
    std::uniform_real_distribution<double> time(0.0, 1e-4);
    for (int i = 0; i < 200; ++i) {
        const auto pops = superposition_populations(time(rng), phase(rng), larmor);
        CHECK(pops.p_plus + pops.p_minus == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(pops.p_plus >= 0.0);
        CHECK(pops.p_minus >= 0.0);
    }
}

TEST_CASE("projected population") {
    CHECK(projected_population(0.7, 0.7, larmor_nominal, 0.0) == doctest::Approx(1.0));
    CHECK(projected_population(0.7 + pi, 0.7, larmor_nominal, 0.0) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK(projected_population(0.2 * pi, 0.5 * pi, larmor_nominal, 0.15 * pi / larmor_nominal) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("compensation phase") {
    // Frozen: delta_w - 2*larmor*tau at the quoted working point = 0.1808 pi.
    CHECK(compensation_phase(380e-9, larmor_nominal, 0.5 * pi) ==
          doctest::Approx(0.5679999517690346).epsilon(1e-12));
    CHECK(compensation_phase(1e-6, 0.0, 0.4) == doctest::Approx(0.4));
    const double period_tau = two_pi / (2.0 * larmor_nominal);
    CHECK(compensation_phase(period_tau, larmor_nominal, 0.4) ==
          doctest::Approx(0.4).epsilon(1e-9));
    CHECK_THROWS_AS(compensation_phase(-1.0, larmor_nominal, 0.0), std::invalid_argument);
}

TEST_CASE("read-then-read complementarity") {
    const auto env = MagneticEnvironment::from_larmor(larmor_nominal);
    const double t0 = 90e-6;
    const double tau1 = 380e-9, tau2 = 3.4e-6;
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> phase(0.0, two_pi);
    for (int i = 0; i < 100; ++i) {
        const double delta_w = phase(rng);
        const double delta_r = phase(rng);
        auto state = evolve(store(ProbePulse{100e-9, 1.0, 0.0},
                                  BeamPair::balanced(1.0, delta_w), 0.1),
                            tau1, env, t0);
        const double stored_at_first = state.stored_norm();
        const auto first = read(state, BeamPair::balanced(1.0, delta_r));
        auto later = evolve(first.remaining, tau2 - tau1, env, t0);
        // Second read at its own Delta = 0: aligned with the surviving component.
        const double delta_second =
            wrap_angle(delta_r + pi - 2.0 * env.larmor() * (tau2 - tau1));
        const auto second = read(later, BeamPair::balanced(1.0, delta_second));
        const double corrected =
            std::norm(first.output) +
            std::norm(second.output) * std::exp((tau2 - tau1) / t0);
        CHECK(corrected == doctest::Approx(stored_at_first).epsilon(1e-9));
    }
}

TEST_CASE("compensated readout is flat after decay correction") {
    const auto env = MagneticEnvironment::from_larmor(larmor_nominal);
    const double t0 = 90e-6;
    const double eta = 0.1;
    for (double t : {0.38e-6, 1e-6, 5e-6, 20e-6, 50e-6, 100e-6}) {
        auto state = evolve(store(ProbePulse{100e-9, 1.0, 0.0},
                                  BeamPair::balanced(1.0, 0.5 * pi), eta),
                            t, env, t0);
        const auto rr =
            read(state, BeamPair::balanced(1.0, compensation_phase(t, env.larmor(), 0.5 * pi)));
        CHECK(std::norm(rr.output) * std::exp(t / t0) == doctest::Approx(eta).epsilon(1e-12));
    }
}

TEST_CASE("channel isolation") {
    const auto state = store(ProbePulse{100e-9, 1.0, 0.0}, BeamPair::minus_only(1.0), 0.1);
    const auto wrong = read(state, BeamPair::plus_only(1.0));
    CHECK(wrong.output == std::complex<double>(0.0, 0.0));
    CHECK(wrong.remaining.stored_norm() == doctest::Approx(state.stored_norm()));
    const auto right = read(wrong.remaining, BeamPair::minus_only(1.0));
    CHECK(std::norm(right.output) == doctest::Approx(state.stored_norm()).epsilon(1e-12));
}
