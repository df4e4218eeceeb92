#include <doctest.h>

#include <cmath>
#include <random>

#include "gravphase/analysis.hpp"
#include "gravphase/errors.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace gravphase;

namespace {
const Constants c{};
}

TEST_CASE("points exactly on a line fit exactly") {
    std::vector<PhaseDataPoint> data;
    for (double x : {0.2, 0.4, 0.6, 0.8})
        data.push_back({x, -0.1 + 0.5 * x, 1e-6});
    const FitResult fit = weighted_linear_fit(data);
    CHECK(fit.slope == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(fit.intercept == doctest::Approx(-0.1).epsilon(1e-9));
    CHECK(fit.chi2_red < 1e-6);
    CHECK(fit.dof == 2);
}

TEST_CASE("flat symmetric data: zero slope, p = 1") {
    std::vector<PhaseDataPoint> data = {
        {0.25, -0.24, 0.02}, {0.5, -0.24, 0.02}, {0.75, -0.24, 0.02}};
    const FitResult fit = weighted_linear_fit(data);
    CHECK(fit.slope == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    CHECK(fit.p_value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("random datasets match the normal-equations oracle to 1e-12") {
    std::mt19937_64 rng(11u);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    std::uniform_real_distribution<double> phase(-1.0, 1.0);
    std::uniform_real_distribution<double> sig(0.01, 0.3);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<PhaseDataPoint> data;
        std::vector<double> xs, ys, ss;
        const int n = 3 + static_cast<int>(u(rng) * 20);
        for (int i = 0; i < n; ++i) {
            PhaseDataPoint p{u(rng), phase(rng), sig(rng)};
            data.push_back(p);
            xs.push_back(p.p_upper);
            ys.push_back(p.phase);
            ss.push_back(p.sigma);
        }
        const FitResult fit = weighted_linear_fit(data);
        const auto oracle = oracles::wls_normal_equations(xs, ys, ss);
        CHECK(std::abs(fit.slope - static_cast<double>(oracle.slope)) <=
              1e-12 * std::max(1.0, std::abs(fit.slope)));
        CHECK(std::abs(fit.slope_sigma - static_cast<double>(oracle.slope_sigma)) <=
              1e-12 * fit.slope_sigma);
    }
}

TEST_CASE("fit validation") {
    std::vector<PhaseDataPoint> two = {{0.2, 0.0, 0.1}, {0.8, 0.1, 0.1}};
    CHECK_THROWS_AS(weighted_linear_fit(two), ValidationError);
    std::vector<PhaseDataPoint> degenerate = {
        {0.5, 0.0, 0.1}, {0.5, 0.1, 0.1}, {0.5, 0.2, 0.1}};
    CHECK_THROWS_AS(weighted_linear_fit(degenerate), RankError);
    std::vector<PhaseDataPoint> bad_sigma = {
        {0.2, 0.0, 0.0}, {0.5, 0.1, 0.1}, {0.8, 0.2, 0.1}};
    CHECK_THROWS_AS(weighted_linear_fit(bad_sigma), ValidationError);
}

TEST_CASE("adding a constant moves the intercept, never the slope") {
    std::vector<PhaseDataPoint> data = {
        {0.25, -0.23, 0.03}, {0.5, -0.21, 0.05}, {0.75, -0.27, 0.04}, {0.6, -0.2, 0.06}};
    const FitResult base = weighted_linear_fit(data);
    for (auto& p : data) p.phase += 0.7;
    const FitResult shifted = weighted_linear_fit(data);
    CHECK(shifted.slope == doctest::Approx(base.slope).epsilon(1e-12));
    CHECK(shifted.p_value == doctest::Approx(base.p_value).epsilon(1e-12));
    CHECK(shifted.intercept == doctest::Approx(base.intercept + 0.7).epsilon(1e-12));
}

TEST_CASE("scaling all sigmas by c scales slope_sigma by c and chi2 by 1/c^2") {
    std::vector<PhaseDataPoint> data = {
        {0.25, -0.23, 0.03}, {0.5, -0.21, 0.05}, {0.75, -0.27, 0.04}, {0.6, -0.2, 0.06}};
    const FitResult base = weighted_linear_fit(data);
    const double factor = 2.5;
    for (auto& p : data) p.sigma *= factor;
    const FitResult scaled = weighted_linear_fit(data);
    CHECK(scaled.slope_sigma == doctest::Approx(base.slope_sigma * factor).epsilon(1e-12));
    CHECK(scaled.chi2_red ==
          doctest::Approx(base.chi2_red / (factor * factor)).epsilon(1e-12));
}

TEST_CASE("reduced chi squared") {
    std::vector<PhaseDataPoint> data = {{0.5, -0.2, 0.1}};
    SUBCASE("model equal to data gives zero") {
        CHECK(reduced_chi_squared(data, -0.2) == 0.0);
    }
    SUBCASE("one point one sigma off gives one") {
        CHECK(reduced_chi_squared(data, -0.3) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("measured ring phases against a model value") {
        // Published phase set with assumed uncertainties; demonstration only,
        // the per-point sigmas are not public.
        std::vector<PhaseDataPoint> measured = {
            {0.25, -0.23, 0.03}, {0.5, -0.24, 0.03}, {0.75, -0.27, 0.03}};
        const double chi2 = reduced_chi_squared(measured, -0.2467);
        CHECK(std::isfinite(chi2));
        CHECK(chi2 < 5.0);
    }
}

TEST_CASE("student-t option inflates the p-value for tiny samples") {
    std::vector<PhaseDataPoint> data = {
        {0.25, -0.20, 0.05}, {0.5, -0.24, 0.05}, {0.75, -0.27, 0.05}};
    const FitResult normal = weighted_linear_fit(data, false);
    const FitResult t = weighted_linear_fit(data, true);
    CHECK(t.p_value > normal.p_value);
}

TEST_CASE("back-action bounds") {
    const InterferometerSpec spec = fixtures::ring_spec(c);
    const SourceModel source = fixtures::ring_source();
    SUBCASE("1.25 kg at 1 mm/s velocity uncertainty") {
        const BackactionBounds bounds = backaction_bounds(1.25, 1e-3, spec, source, c);
        CHECK(bounds.position_uncertainty >= 1e-32);
        CHECK(bounds.position_uncertainty == doctest::Approx(4.218e-32).epsilon(1e-3));
        CHECK(bounds.max_source_deflection < bounds.position_uncertainty);
    }
    SUBCASE("doubling delta_v halves the uncertainty bound") {
        const BackactionBounds a = backaction_bounds(1.25, 1e-3, spec, source, c);
        const BackactionBounds b = backaction_bounds(1.25, 2e-3, spec, source, c);
        CHECK(b.position_uncertainty ==
              doctest::Approx(0.5 * a.position_uncertainty).epsilon(1e-12));
    }
    SUBCASE("deflection matches a 10x-resolution direct integration") {
        const BackactionBounds bounds = backaction_bounds(1.25, 1e-3, spec, source, c);
        const auto [x1, x2] = mach_zehnder_arms(spec, c);
        const Trajectory xs = parabolic_source(spec);
        double best = 0.0;
        for (const Trajectory* arm : {&x1, &x2}) {
            // Double time integral of the reaction pull with kernel (2T - s),
            // dense trapezoid at 10x the production node count, using the
            // sources-module field.
            const int n = 40001;
            const double t_end = 2.0 * spec.T;
            const double h = t_end / (n - 1);
            Vec3 acc{};
            for (int i = 0; i < n; ++i) {
                const double t = h * i;
                const Vec3 y = arm->position(t) - xs.position(t);
                const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
                acc += field_at(source, y, c) * (w * (t_end - t) * (-spec.m / 1.25));
            }
            best = std::max(best, (acc * h).norm());
        }
        CHECK(bounds.max_source_deflection == doctest::Approx(best).epsilon(1e-5));
    }
    SUBCASE("validation") {
        CHECK_THROWS_AS(backaction_bounds(0.0, 1e-3, spec, source, c), ValidationError);
        CHECK_THROWS_AS(backaction_bounds(1.25, 0.0, spec, source, c), ValidationError);
    }
}

TEST_CASE("back-action stays unobservable across kilogram-scale scenarios") {
    std::mt19937_64 rng(3u);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 8; ++trial) {
        InterferometerSpec spec;
        spec.m = c.m_rb87;
        spec.M = 1.0 + 4.0 * u(rng);
        spec.k = (1.0 + u(rng)) * 2.0e8;
        spec.T = 0.4 + 0.6 * u(rng);
        spec.xs0 = {0.0, 0.0, 0.3 + 0.5 * u(rng)};
        spec.a_src = {0.0, 0.0, 9.8};
        const auto source = SourceModel::point(spec.M, {0.05, 0.0, 0.0});
        const double delta_v = 1e-6 * std::pow(10.0, 3.0 * u(rng));  // >= 1 um/s
        const BackactionBounds bounds =
            backaction_bounds(spec.M, delta_v, spec, source, c);
        CHECK(bounds.max_source_deflection < bounds.position_uncertainty);
    }
}
