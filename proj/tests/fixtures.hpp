#pragma once

// The calibrated ring-gradiometer geometry shared by tests and the acceptance
// suite. Mirrors scenarios/fig2_quantum.cfg.

#include <cmath>

#include "gravphase/constants.hpp"
#include "gravphase/kinematics.hpp"
#include "gravphase/sources.hpp"

namespace fixtures {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kRingMass = 1.25;        // kg
inline constexpr double kRingRadius = 0.082;     // m (calibrated, not published)
inline constexpr double kRingOffset = 0.012;     // m; closest approach 0.070 m
inline constexpr double kApexAbovePlane = 0.04;  // m
inline constexpr double kSeparation = 0.25;      // m wave packet separation
inline constexpr double kBaseline = 0.24;        // m gradiometer baseline
inline constexpr double kGravity = 9.80665;      // m s^-2

inline gravphase::InterferometerSpec ring_spec(const gravphase::Constants& c) {
    gravphase::InterferometerSpec spec;
    spec.m = c.m_rb87;
    spec.M = kRingMass;
    spec.M_detector = 1.0;
    spec.k = 52.0 * kPi / c.lambda_laser;
    spec.T = gravphase::InterferometerSpec::pulse_time_for_separation(
        kSeparation, spec.m, spec.k, c);
    spec.x0 = {0.0, 0.0, 0.0};
    // Ring plane 4 cm below the upper-arm apex at t = T.
    spec.xs0 = {0.0, 0.0, 0.5 * kSeparation - kApexAbovePlane};
    spec.a_src = {0.0, 0.0, kGravity};
    spec.P1 = 0.5;
    return spec;
}

// Semicircular arc facing the atom line: the line passes 0.012 m from the
// ring axis, so the nearest arc material sits at 0.082 - 0.012 = 0.070 m.
inline gravphase::SourceModel ring_source() {
    gravphase::RingArc ring;
    ring.mass = kRingMass;
    ring.radius = kRingRadius;
    ring.center = {kRingOffset, 0.0, 0.0};
    ring.normal = {0.0, 0.0, 1.0};
    ring.arc_span = kPi;
    ring.arc_phase = kPi / 2.0;
    return gravphase::SourceModel::ring(ring);
}

}  // namespace fixtures
