#pragma once

// Independent oracles for the test suite. These stay deliberately naive and
// separate from the library paths they check.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "gravphase/vec3.hpp"

namespace oracles {

// Plain trapezoid rule at high n; reference for the Simpson machinery.
inline double trapezoid(const std::function<double(double)>& f, double a, double b,
                        int n) {
    const double h = (b - a) / (n - 1);
    double acc = 0.5 * (f(a) + f(b));
    for (int i = 1; i < n - 1; ++i) acc += f(a + h * i);
    return acc * h;
}

// Weighted least squares through explicit normal equations in long double.
struct WlsOracle {
    long double slope, intercept, slope_sigma;
};

inline WlsOracle wls_normal_equations(const std::vector<double>& x,
                                      const std::vector<double>& y,
                                      const std::vector<double>& sigma) {
    long double S = 0, Sx = 0, Sy = 0, Sxx = 0, Sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const long double w = 1.0L / ((long double)sigma[i] * sigma[i]);
        S += w;
        Sx += w * x[i];
        Sy += w * y[i];
        Sxx += w * x[i] * x[i];
        Sxy += w * x[i] * y[i];
    }
    const long double det = S * Sxx - Sx * Sx;
    return {(S * Sxy - Sx * Sy) / det, (Sxx * Sy - Sx * Sxy) / det,
            std::sqrt((long double)(S / det))};
}

// Explicit four-amplitude interference sum for the 2x2 interferometer pair
// closed by U = [[1, i], [i, 1]]/sqrt(2) on each side.
inline std::array<double, 4> bmv_four_port(
    const std::array<std::array<std::complex<double>, 2>, 2>& amp) {
    const std::complex<double> diag(1.0 / std::sqrt(2.0), 0.0);
    const std::complex<double> off(0.0, 1.0 / std::sqrt(2.0));
    std::array<double, 4> probs{};
    for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 2; ++s) {
            std::complex<double> out{};
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    out += (r == i ? diag : off) * (s == j ? diag : off) * amp[i][j];
            probs[2 * r + s] = std::norm(out);
        }
    return probs;
}

// Fixed-step RK4 two-body fall of independent particles in a force field,
// used at 10x resolution as the cross-check for the accelerometer and
// back-action scenarios.
inline void rk4_fall(const std::function<gravphase::Vec3(const gravphase::Vec3&)>& accel,
                     gravphase::Vec3& x, gravphase::Vec3& v, double duration, int steps) {
    const double h = duration / steps;
    for (int i = 0; i < steps; ++i) {
        const gravphase::Vec3 k1v = accel(x), k1x = v;
        const gravphase::Vec3 k2v = accel(x + k1x * (0.5 * h)), k2x = v + k1v * (0.5 * h);
        const gravphase::Vec3 k3v = accel(x + k2x * (0.5 * h)), k3x = v + k2v * (0.5 * h);
        const gravphase::Vec3 k4v = accel(x + k3x * h), k4x = v + k3v * h;
        x += (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (h / 6.0);
        v += (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6.0);
    }
}

}  // namespace oracles
