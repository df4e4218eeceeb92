#include "gravphase/analysis.hpp"

#include <cmath>
#include <set>
#include <string>

#include "gravphase/errors.hpp"
#include "gravphase/quadrature.hpp"
#include "gravphase/trajectory.hpp"

namespace gravphase {

namespace {

void validate_points(const std::vector<PhaseDataPoint>& data) {
    for (const auto& p : data) {
        if (!(p.p_upper > 0.0 && p.p_upper < 1.0))
            throw ValidationError("analysis: p_upper must lie in (0, 1)");
        if (!(p.sigma > 0.0))
            throw ValidationError("analysis: sigma must be positive");
        if (!std::isfinite(p.phase))
            throw NumericError("analysis: non-finite phase value");
    }
}

double student_t_p_value(double t, int dof) {
    // Two-sided: P(|T| > t) = I_{dof/(dof+t^2)}(dof/2, 1/2).
    const double x = dof / (dof + t * t);
    return incomplete_beta(0.5 * dof, 0.5, x);
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    // Continued fraction (Lentz); standard special-function evaluation.
    auto cf = [](double a_, double b_, double x_) {
        const double qab = a_ + b_, qap = a_ + 1.0, qam = a_ - 1.0;
        double c = 1.0, d = 1.0 - qab * x_ / qap;
        const double tiny = 1e-300;
        if (std::abs(d) < tiny) d = tiny;
        d = 1.0 / d;
        double result = d;
        for (int m = 1; m <= 300; ++m) {
            const int m2 = 2 * m;
            double aa = m * (b_ - m) * x_ / ((qam + m2) * (a_ + m2));
            d = 1.0 + aa * d;
            if (std::abs(d) < tiny) d = tiny;
            c = 1.0 + aa / c;
            if (std::abs(c) < tiny) c = tiny;
            d = 1.0 / d;
            result *= d * c;
            aa = -(a_ + m) * (qab + m) * x_ / ((a_ + m2) * (qap + m2));
            d = 1.0 + aa * d;
            if (std::abs(d) < tiny) d = tiny;
            c = 1.0 + aa / c;
            if (std::abs(c) < tiny) c = tiny;
            d = 1.0 / d;
            const double del = d * c;
            result *= del;
            if (std::abs(del - 1.0) < 1e-14) break;
        }
        return result;
    };
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * cf(a, b, x) / a;
    return 1.0 - front * cf(b, a, 1.0 - x) / b;
}

FitResult weighted_linear_fit(const std::vector<PhaseDataPoint>& data, bool student_t) {
    if (data.size() < 3)
        throw ValidationError("weighted_linear_fit: need at least 3 points");
    validate_points(data);
    std::set<double> distinct;
    for (const auto& p : data) distinct.insert(p.p_upper);
    if (distinct.size() < 2)
        throw RankError("weighted_linear_fit: abscissae are degenerate");

    double S = 0.0, Sx = 0.0, Sy = 0.0, Sxx = 0.0, Sxy = 0.0;
    for (const auto& p : data) {
        const double w = 1.0 / (p.sigma * p.sigma);
        S += w;
        Sx += w * p.p_upper;
        Sy += w * p.phase;
        Sxx += w * p.p_upper * p.p_upper;
        Sxy += w * p.p_upper * p.phase;
    }
    const double det = S * Sxx - Sx * Sx;
    if (!(det > 0.0))
        throw RankError("weighted_linear_fit: singular normal equations");

    FitResult fit;
    fit.slope = (S * Sxy - Sx * Sy) / det;
    fit.intercept = (Sxx * Sy - Sx * Sxy) / det;
    fit.slope_sigma = std::sqrt(S / det);
    fit.dof = static_cast<int>(data.size()) - 2;

    double chi2 = 0.0;
    for (const auto& p : data) {
        const double r = (p.phase - fit.intercept - fit.slope * p.p_upper) / p.sigma;
        chi2 += r * r;
    }
    fit.chi2_red = chi2 / fit.dof;

    const double t = std::abs(fit.slope) / fit.slope_sigma;
    fit.p_value = student_t ? student_t_p_value(t, fit.dof)
                            : std::erfc(t / std::sqrt(2.0));
    return fit;
}

double reduced_chi_squared(const std::vector<PhaseDataPoint>& data,
                           const std::vector<double>& model) {
    if (data.empty())
        throw ValidationError("reduced_chi_squared: need at least 1 point");
    if (model.size() != data.size())
        throw ValidationError("reduced_chi_squared: model size mismatch");
    validate_points(data);
    double chi2 = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double r = (data[i].phase - model[i]) / data[i].sigma;
        chi2 += r * r;
    }
    return chi2 / static_cast<double>(data.size());
}

double reduced_chi_squared(const std::vector<PhaseDataPoint>& data, double model) {
    return reduced_chi_squared(data, std::vector<double>(data.size(), model));
}

BackactionBounds backaction_bounds(double M, double delta_v,
                                   const InterferometerSpec& spec,
                                   const SourceModel& source, const Constants& c) {
    if (!(M > 0.0) || !(delta_v > 0.0))
        throw ValidationError("backaction_bounds: M and delta_v must be positive");
    spec.validate();
    source.validate();

    BackactionBounds bounds;
    bounds.position_uncertainty = c.hbar / (2.0 * M * delta_v);

    // Deflection of the source center of mass under the reaction to the pull
    // it exerts on the test particle riding one arm, measured at 2T against
    // the unperturbed parabola: the double time integral of
    // (m/M) |g_source(arm)| with kernel (2T - s), per vector component.
    const auto [x1, x2] = mach_zehnder_arms(spec, c);
    const Trajectory xs = parabolic_source(spec);
    const double t_end = 2.0 * spec.T;
    const int n = 4001;
    const TimeGrid grid(0.0, t_end, n);

    auto deflection = [&](const Trajectory& arm) {
        std::vector<double> sx(static_cast<std::size_t>(n)), sy(sx), sz(sx);
        for (int i = 0; i < n; ++i) {
            const double t = grid.time(i);
            const Vec3 y = arm.position(t) - xs.position(t);
            const Vec3 a_source = field_at(source, y, c) * (-spec.m / M);
            const double kernel = t_end - t;
            sx[static_cast<std::size_t>(i)] = kernel * a_source.x;
            sy[static_cast<std::size_t>(i)] = kernel * a_source.y;
            sz[static_cast<std::size_t>(i)] = kernel * a_source.z;
        }
        return Vec3{integrate_time(sx, grid), integrate_time(sy, grid),
                    integrate_time(sz, grid)}
            .norm();
    };
    bounds.max_source_deflection = std::max(deflection(x1), deflection(x2));
    return bounds;
}

}  // namespace gravphase
