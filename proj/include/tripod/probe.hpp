#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace tripod {

// Weak input signal pulse. The envelope is a Gaussian with the given
// intensity FWHM, scaled so that the integral of |amplitude|^2 over time
// equals `energy` (normalized units). Initial phase is zero.
struct ProbePulse {
    double fwhm = 100e-9;   // intensity FWHM (s)
    double energy = 1.0;    // integral of |envelope|^2 dt (normalized)
    double center = 0.0;    // arrival time of the pulse peak (s)

    std::complex<double> amplitude(double t) const {
        if (energy <= 0.0) return {0.0, 0.0};
        constexpr double four_ln2 = 4.0 * std::numbers::ln2;
        const double peak_power =
            energy / fwhm * 2.0 * std::sqrt(std::numbers::ln2 / std::numbers::pi);
        const double x = (t - center) / fwhm;
        return {std::sqrt(peak_power) * std::exp(-0.5 * four_ln2 * x * x), 0.0};
    }

    bool storable() const { return energy > 0.0; }
};

}  // namespace tripod
