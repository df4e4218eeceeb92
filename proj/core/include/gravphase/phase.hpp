#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "gravphase/constants.hpp"
#include "gravphase/kinematics.hpp"
#include "gravphase/sources.hpp"
#include "gravphase/time_grid.hpp"
#include "gravphase/trajectory.hpp"

namespace gravphase {

enum class PhaseMethod { potential_integral, field_energy, semiclassical };

const char* phase_method_name(PhaseMethod method);

struct PhaseResult {
    double delta_phi = 0.0;   // rad
    PhaseMethod method = PhaseMethod::potential_integral;
    double quadrature_tol = 0.0;
    std::vector<std::string> assumptions;
};

struct PortProbabilities {
    double p_d1 = 0.0;
    double p_d2 = 0.0;
    double d1 = 0.0;  // port displacements, m
    double d2 = 0.0;
};

// Sign convention throughout: delta_phi = (1/hbar) Int [U(arm1) - U(arm2)] dt,
// with arm 1 the +k arm. The semiclassical prescription is reported in the
// same convention, so a field pulling the atoms toward a source above them
// yields a negative phase in every method.

// Perturbative phase along the unperturbed arms for a general source carried
// along the trajectory xs (the source geometry is expressed relative to the
// trajectory point). The deflections of the arms never enter here.
PhaseResult phase_potential_integral(const Trajectory& x1, const Trajectory& x2,
                                     const Trajectory& xs, const SourceModel& source,
                                     double m, const TimeGrid& grid,
                                     const Constants& c);

// Point-source form: U = -G m M / |x_i - x_s|. M = 0 is the removed-source
// limit and returns zero phase.
PhaseResult phase_potential_integral(const Trajectory& x1, const Trajectory& x2,
                                     const Trajectory& xs, double m, double M,
                                     const TimeGrid& grid, const Constants& c);

// Field-energy route: at each time node the interaction energy between a
// point particle of mass m at the arm position and the source is evaluated by
// the volume quadrature; the energy difference is then integrated over time.
PhaseResult phase_from_field_energy(const Trajectory& x1, const Trajectory& x2,
                                    const Trajectory& xs, const SourceModel& source,
                                    double m, const TimeGrid& grid,
                                    const QuadratureSpec& q, const Constants& c);

PhaseResult phase_from_field_energy(const Trajectory& x1, const Trajectory& x2,
                                    const Trajectory& xs, double m, double M,
                                    const TimeGrid& grid, const QuadratureSpec& q,
                                    const Constants& c);

// Two-port interference with the balanced recombiner:
// p_d1 = (1 + 2 |A1||A2| cos dphi) / 2.
PortProbabilities ports_from_phase(double delta_phi, std::complex<double> A1,
                                   std::complex<double> A2, double d1, double d2);

// Literal port-ratio angle, arccos((p1 - p2)/(p1 + p2)); folds contrast into
// the angle when the splitter is unbalanced.
double port_ratio_phase(const PortProbabilities& ports);

struct FringePoint {
    double ref_phase = 0.0;
    double p_d1 = 0.0;
};

// Reference-phase sweep of the detection fringe, uniform over [0, 2 pi).
std::vector<FringePoint> fringe_scan(double delta_phi, std::complex<double> A1,
                                     std::complex<double> A2, int points);

// First-harmonic recovery of delta_phi from a uniform fringe scan; exact for
// noiseless samples regardless of contrast.
double fringe_fit_phase(const std::vector<FringePoint>& scan);

// Semiclassical phase of the uniform-force model. Evaluates the full
// three-part prescription (action difference along the perturbed arms, laser
// imprints at the three pulses, separation phase at detection) and the
// reduced functional k_eff . (2 delta(T) - delta(2T)) of the common
// deflection; raises ConsistencyError if they disagree beyond 1e-9 rad.
PhaseResult phase_semiclassical(const SemiclassicalEvolution& evo,
                                const InterferometerSpec& spec,
                                const SourceModel& source, const Constants& c);

// Classical-field energy bookkeeping: P1 E1 + (1 - P1) E2.
double schrodinger_newton_energy(double P1, double E1, double E2);

// Phase attributed to the source branches entangled with each arm; the same
// interaction integral, evaluated from the source side.
PhaseResult source_backreaction_phase(const Trajectory& x1, const Trajectory& x2,
                                      const Trajectory& xs, double m, double M,
                                      const TimeGrid& grid, const Constants& c);

}  // namespace gravphase
