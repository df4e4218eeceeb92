#pragma once

#include <functional>
#include <span>
#include <vector>

#include "gravphase/time_grid.hpp"

namespace gravphase {

// Composite Simpson on a uniform odd grid. Exact for polynomials of degree
// <= 3 on the grid.
double integrate_time(std::span<const double> samples, const TimeGrid& grid);

// Sample f on the grid and integrate.
double integrate_time(const std::function<double(double)>& f, const TimeGrid& grid);

struct RefineResult {
    double value = 0.0;
    double achieved_rel_tol = 0.0;
    int n = 0;  // sample count of the final grid
};

// Uniform refinement: re-evaluates integral_fn on nested grids (n -> 2n-1)
// until two successive estimates agree to rel_tol relatively. Throws
// ConvergenceError carrying the last two estimates if n would exceed 2^20.
RefineResult refine_until_converged(
    const std::function<double(const TimeGrid&)>& integral_fn,
    const TimeGrid& initial, double rel_tol);

namespace gauss {

// Nodes/weights for Gauss-Legendre on [-1, 1]; order is cached.
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const Rule& legendre(int order);

}  // namespace gauss

}  // namespace gravphase
