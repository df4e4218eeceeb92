#pragma once

#include <string>

#include "gravphase/errors.hpp"

namespace gravphase {

// Uniform time grid with an odd sample count, so composite Simpson applies
// without a trapezoid remainder cell.
struct TimeGrid {
    double t0 = 0.0;
    double t1 = 1.0;
    int n = 3;

    TimeGrid() = default;
    TimeGrid(double start, double end, int samples) : t0(start), t1(end), n(samples) {
        validate();
    }

    void validate() const {
        if (!(t1 > t0))
            throw ValidationError("TimeGrid: t1 must exceed t0");
        if (n < 3 || n % 2 == 0)
            throw ValidationError("TimeGrid: n must be odd and >= 3, got " +
                                  std::to_string(n));
    }

    double dt() const { return (t1 - t0) / static_cast<double>(n - 1); }
    double time(int i) const { return t0 + dt() * static_cast<double>(i); }

    // Nested refinement: every existing node stays a node.
    TimeGrid refined() const { return TimeGrid(t0, t1, 2 * n - 1); }
};

}  // namespace gravphase
