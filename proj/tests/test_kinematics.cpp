#include <doctest.h>

#include <cmath>

#include "gravphase/errors.hpp"
#include "gravphase/kinematics.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace gravphase;

namespace {
const Constants c{};

InterferometerSpec basic_spec() {
    InterferometerSpec spec;
    spec.m = c.m_rb87;
    spec.M = 1.25;
    spec.k = 2.0e8;
    spec.T = 0.8;
    spec.xs0 = {0.0, 0.0, 0.5};
    spec.a_src = {0.0, 0.0, 9.8};
    return spec;
}
}  // namespace

TEST_CASE("arms separate to 2 hbar k T / m at the mirror pulse") {
    const auto spec = basic_spec();
    const auto [x1, x2] = mach_zehnder_arms(spec, c);
    const double separation = (x1.position(spec.T) - x2.position(spec.T)).norm();
    CHECK(separation ==
          doctest::Approx(2.0 * c.hbar * spec.k * spec.T / spec.m).epsilon(1e-14));
}

TEST_CASE("arms close exactly at 2T") {
    const auto spec = basic_spec();
    const auto [x1, x2] = mach_zehnder_arms(spec, c);
    CHECK(x1.position(2.0 * spec.T) == spec.x0);
    CHECK(x2.position(2.0 * spec.T) == spec.x0);
}

TEST_CASE("pulse time for the 52 hbar k / 25 cm geometry") {
    // Separation convention: 2 hbar k T / m = 0.25 m with k = 52 pi / lambda.
    const double k = 52.0 * fixtures::kPi / c.lambda_laser;
    const double T =
        InterferometerSpec::pulse_time_for_separation(0.25, c.m_rb87, k, c);
    CHECK(T == doctest::Approx(0.817004).epsilon(1e-5));
    InterferometerSpec spec = basic_spec();
    spec.k = k;
    spec.T = T;
    const auto [x1, x2] = mach_zehnder_arms(spec, c);
    CHECK((x1.position(T) - x2.position(T)).norm() ==
          doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("source parabola") {
    InterferometerSpec spec = basic_spec();
    SUBCASE("zero acceleration holds the apex position") {
        spec.a_src = {};
        const Trajectory xs = parabolic_source(spec);
        CHECK(xs.position(0.0) == spec.xs0);
        CHECK(xs.position(1.3) == spec.xs0);
    }
    SUBCASE("the vertex sits at t = T") {
        const Trajectory xs = parabolic_source(spec);
        CHECK(xs.position(spec.T) == spec.xs0);
    }
    SUBCASE("half a (t-T)^2 form") {
        spec.a_src = {0.0, 0.0, -2.0};
        spec.T = 1.0;
        const Trajectory xs = parabolic_source(spec);
        CHECK(xs.position(0.0).z == doctest::Approx(spec.xs0.z - 1.0).epsilon(1e-15));
    }
}

TEST_CASE("beamsplitter amplitudes") {
    {
        const auto [a1, a2] = beamsplitter_amplitudes(0.5);
        CHECK(a1.real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
        CHECK(a2.real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    }
    {
        const auto [a1, a2] = beamsplitter_amplitudes(1.0);
        CHECK(a1.real() == 1.0);
        CHECK(a2.real() == 0.0);
    }
    {
        const auto [a1, a2] = beamsplitter_amplitudes(0.25);
        CHECK(a1.real() == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(a2.real() == doctest::Approx(std::sqrt(0.75)).epsilon(1e-15));
        CHECK(std::norm(a1) + std::norm(a2) == doctest::Approx(1.0).epsilon(1e-15));
    }
    CHECK_THROWS_AS(beamsplitter_amplitudes(1.2), ValidationError);
}

TEST_CASE("semiclassical evolution reduces to the free arms as GM -> 0") {
    InterferometerSpec spec = basic_spec();
    spec.M = 1e-30;
    const auto source = SourceModel::point(spec.M, {});
    const auto evo = semiclassical_evolve(spec, source, 2000, c);
    const auto [x1, x2] = mach_zehnder_arms(spec, c);
    for (double t : {0.0, 0.3, spec.T, 1.1, 2.0 * spec.T}) {
        CHECK((evo.x1.position(t) - x1.position(t)).norm() < 1e-10);
        CHECK((evo.x2.position(t) - x2.position(t)).norm() < 1e-10);
    }
}

TEST_CASE("P1 = 0 puts the center of mass on the lower arm") {
    InterferometerSpec spec = basic_spec();
    spec.P1 = 0.0;
    const auto source = SourceModel::point(spec.M, {});
    const auto evo = semiclassical_evolve(spec, source, 2000, c);
    for (std::size_t i = 0; i < evo.pos2.size(); i += 97)
        CHECK((evo.x_cm.position(evo.dt * static_cast<double>(i)) - evo.pos2[i]).norm() <
              1e-12);
}

TEST_CASE("center of mass is the probability-weighted arm combination") {
    InterferometerSpec spec = basic_spec();
    spec.P1 = 0.3;
    const auto source = SourceModel::point(spec.M, {});
    const auto evo = semiclassical_evolve(spec, source, 2000, c);
    for (std::size_t i = 0; i < evo.pos1.size(); i += 41) {
        const Vec3 cm = evo.pos1[i] * spec.P1 + evo.pos2[i] * (1.0 - spec.P1);
        CHECK((evo.x_cm.position(evo.dt * static_cast<double>(i)) - cm).norm() < 1e-12);
    }
}

TEST_CASE("both arms feel the identical force: separation stays rigid") {
    const Constants cc{};
    InterferometerSpec spec = fixtures::ring_spec(cc);
    spec.P1 = 0.75;
    const auto evo = semiclassical_evolve(spec, fixtures::ring_source(), 2000, cc);
    const double v = spec.arm_speed(cc);
    for (std::size_t i = 0; i < evo.pos1.size(); i += 59) {
        const double t = evo.dt * static_cast<double>(i);
        const double expected = 2.0 * v * std::min(t, 2.0 * spec.T - t);
        const double actual = (evo.pos1[i] - evo.pos2[i]).norm();
        CHECK(std::abs(actual - expected) < 1e-12);
    }
}

TEST_CASE("midpoint deflection magnitude grows with P1 in the ring geometry") {
    const Constants cc{};
    double previous = 0.0;
    for (double P1 : {0.25, 0.5, 0.75}) {
        InterferometerSpec spec = fixtures::ring_spec(cc);
        spec.P1 = P1;
        const auto evo = semiclassical_evolve(spec, fixtures::ring_source(), 2000, cc);
        const double deflection = std::abs(evo.delta.back().z);
        CHECK(deflection > previous);
        previous = deflection;
    }
}

TEST_CASE("RK4 converges at fourth order on a Kepler-like problem") {
    // One test particle falling around a heavy point mass; global error at a
    // fixed end time against a fine reference.
    const auto accel = [](const Vec3& x) {
        const double mu = 1.0;
        const double r = x.norm();
        return x * (-mu / (r * r * r));
    };
    const Vec3 x0{1.0, 0.0, 0.0};
    const Vec3 v0{0.0, 1.1, 0.0};
    const double duration = 3.0;

    Vec3 x_ref = x0, v_ref = v0;
    oracles::rk4_fall(accel, x_ref, v_ref, duration, 1 << 16);

    double previous_error = 0.0;
    bool first = true;
    for (int steps : {200, 400, 800}) {
        Vec3 x = x0, v = v0;
        oracles::rk4_fall(accel, x, v, duration, steps);
        const double error = (x - x_ref).norm();
        if (!first) {
            const double ratio = previous_error / error;
            CHECK(ratio > 12.0);  // 2^4 = 16 with slack
            CHECK(ratio < 20.0);
        }
        previous_error = error;
        first = false;
    }
}

TEST_CASE("step-count validation") {
    const auto spec = basic_spec();
    const auto source = SourceModel::point(spec.M, {});
    CHECK_THROWS_AS(semiclassical_evolve(spec, source, 500, c), ValidationError);
    CHECK_THROWS_AS(semiclassical_evolve(spec, source, 1001, c), ValidationError);
}

TEST_CASE("proximity guard trips when an arm grazes the source") {
    InterferometerSpec spec = basic_spec();
    spec.xs0 = {0.0, 0.0, 0.05};  // parabola vertex close to the upper arm path
    spec.a_src = {};
    const auto source = SourceModel::point(spec.M, {});
    CHECK_THROWS_AS(semiclassical_evolve(spec, source, 2000, c, 0.2), ProximityError);
}
