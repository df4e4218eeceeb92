#pragma once

#include <vector>

#include "gravphase/constants.hpp"
#include "gravphase/kinematics.hpp"

namespace gravphase {

struct PhaseDataPoint {
    double p_upper = 0.0;  // probability on the upper arm, (0, 1)
    double phase = 0.0;    // rad
    double sigma = 0.0;    // rad, 1-sigma uncertainty
};

struct FitResult {
    double slope = 0.0;        // rad per unit probability
    double intercept = 0.0;    // rad
    double slope_sigma = 0.0;
    double p_value = 0.0;      // two-sided, slope != 0
    double chi2_red = 0.0;
    int dof = 0;
};

// Closed-form weighted least squares (weights 1/sigma^2) for intercept and
// slope. The p-value uses the normal approximation by default; pass
// student_t = true for the small-n variant.
FitResult weighted_linear_fit(const std::vector<PhaseDataPoint>& data,
                              bool student_t = false);

// Zero-parameter model comparison: sum((phase_i - model_i)/sigma_i)^2 / n.
double reduced_chi_squared(const std::vector<PhaseDataPoint>& data,
                           const std::vector<double>& model);
double reduced_chi_squared(const std::vector<PhaseDataPoint>& data, double model);

struct BackactionBounds {
    double position_uncertainty = 0.0;   // hbar / (2 M delta_v), m
    double max_source_deflection = 0.0;  // m, at t = 2T relative to the parabola
};

// Unobservability bound: the source's quantum position uncertainty against
// the deflection its center of mass picks up from the test particle's pull
// along either arm, integrated over [0, 2T]. The reaction acceleration is
// (m/M) times the source's own field at the arm position (G m / r^2 for a
// point source), so extended sources stay regular even when an arm crosses
// the trajectory line.
BackactionBounds backaction_bounds(double M, double delta_v,
                                   const InterferometerSpec& spec,
                                   const SourceModel& source, const Constants& c);

// Regularized incomplete beta, used by the Student-t p-value.
double incomplete_beta(double a, double b, double x);

// Emitted with every fit report: the published slope/p/chi2 numbers came with
// unpublished per-point uncertainties, so they are demonstration targets.
inline constexpr const char* kFitDisclaimer =
    "per-point sigmas are user-supplied inputs; published slope/p/chi2 "
    "values are demonstration targets, not acceptance targets";

}  // namespace gravphase
