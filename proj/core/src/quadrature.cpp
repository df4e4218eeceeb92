#include "gravphase/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "gravphase/errors.hpp"

namespace gravphase {

double integrate_time(std::span<const double> samples, const TimeGrid& grid) {
    grid.validate();
    if (static_cast<int>(samples.size()) != grid.n)
        throw ConfigError("integrate_time: sample count " +
                          std::to_string(samples.size()) +
                          " does not match grid.n = " + std::to_string(grid.n));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!std::isfinite(samples[i]))
            throw NumericError("integrate_time: non-finite sample at index " +
                               std::to_string(i));
    }
    double odd = 0.0, even = 0.0;
    for (int i = 1; i < grid.n - 1; i += 2) odd += samples[i];
    for (int i = 2; i < grid.n - 1; i += 2) even += samples[i];
    return grid.dt() / 3.0 * (samples[0] + samples[grid.n - 1] + 4.0 * odd + 2.0 * even);
}

double integrate_time(const std::function<double(double)>& f, const TimeGrid& grid) {
    std::vector<double> samples(static_cast<std::size_t>(grid.n));
    for (int i = 0; i < grid.n; ++i) samples[static_cast<std::size_t>(i)] = f(grid.time(i));
    return integrate_time(samples, grid);
}

RefineResult refine_until_converged(
    const std::function<double(const TimeGrid&)>& integral_fn,
    const TimeGrid& initial, double rel_tol) {
    if (!(rel_tol > 0.0) || rel_tol > 1e-2)
        throw ValidationError("refine_until_converged: rel_tol must be in (0, 1e-2]");
    constexpr int kMaxSamples = 1 << 20;

    TimeGrid grid = initial;
    double previous = integral_fn(grid);
    while (true) {
        TimeGrid finer = grid.refined();
        if (finer.n > kMaxSamples)
            throw ConvergenceError(
                "refine_until_converged: no convergence by n = 2^20", previous,
                previous);
        double current = integral_fn(finer);
        double diff = std::abs(current - previous);
        double scale = std::max(std::abs(current), std::abs(previous));
        if (diff == 0.0 || diff < rel_tol * scale) {
            double achieved = scale > 0.0 ? diff / scale : 0.0;
            return {current, achieved, finer.n};
        }
        previous = current;
        grid = finer;
    }
}

namespace gauss {

namespace {

// Newton iteration on Legendre polynomials; standard construction.
Rule build(int order) {
    Rule rule;
    rule.nodes.resize(static_cast<std::size_t>(order));
    rule.weights.resize(static_cast<std::size_t>(order));
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < order; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = order * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.nodes[static_cast<std::size_t>(i)] = -x;
        rule.nodes[static_cast<std::size_t>(order - 1 - i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(order - 1 - i)] = w;
    }
    return rule;
}

}  // namespace

const Rule& legendre(int order) {
    if (order < 1) throw ValidationError("gauss::legendre: order must be >= 1");
    static std::map<int, Rule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, build(order)).first;
    return it->second;
}

}  // namespace gauss

}  // namespace gravphase
