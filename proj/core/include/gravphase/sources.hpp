#pragma once

#include <variant>
#include <vector>

#include "gravphase/constants.hpp"
#include "gravphase/vec3.hpp"

namespace gravphase {

// Inverse-square coupling. The potential of a point charge Q at distance r is
// sign * kappa * Q / r, and the energy functional prefactor is sign/(8 pi kappa)
// on |F|^2. Gravity: kappa = G, sign = -1, charge = mass. Electrostatics:
// kappa = 1/(4 pi eps0), sign = +1, charge in coulomb.
struct Coupling {
    enum class Kind { gravity, em, custom };
    Kind kind = Kind::gravity;
    double custom_constant = 0.0;  // kappa when kind == custom

    double kappa(const Constants& c) const;
    double sign() const { return kind == Kind::gravity ? -1.0 : 1.0; }
};

struct PointMass {
    double mass = 0.0;  // charge under the active coupling (kg for gravity)
    Vec3 position{};
};

// Circular arc of uniformly distributed mass. The arc lies in the plane
// through `center` orthogonal to `normal`, spans `arc_span` radians, and is
// azimuthally centered at angle `arc_phase` measured from a deterministic
// in-plane basis vector e1 (see arc_basis). arc_span = 2 pi gives a full ring.
struct RingArc {
    double mass = 0.0;
    double radius = 0.0;
    Vec3 center{};
    Vec3 normal{0.0, 0.0, 1.0};
    double arc_span = 2.0 * 3.14159265358979323846;
    double arc_phase = 0.0;
};

struct UniformField {
    Vec3 g{};  // m s^-2, position-independent
};

struct SourceModel;

struct Composite {
    std::vector<SourceModel> parts;
};

struct SourceModel {
    std::variant<PointMass, RingArc, UniformField, Composite> shape;
    Coupling coupling{};

    static SourceModel point(double mass, const Vec3& position,
                             Coupling coupling = {});
    static SourceModel ring(const RingArc& ring, Coupling coupling = {});
    static SourceModel uniform(const Vec3& g);
    static SourceModel composite(std::vector<SourceModel> parts);

    void validate(int depth = 0) const;
};

// Deterministic in-plane orthonormal basis (e1, e2) for a ring's plane.
std::pair<Vec3, Vec3> arc_basis(const Vec3& normal);

// Potential per unit test charge, J kg^-1 for gravity. Zero at spatial
// infinity for localized sources. Throws SingularityError on a point-mass
// location. Ring arcs are evaluated by Gauss-Legendre line quadrature,
// starting at 64 nodes and doubling until stable to 1e-10.
double potential_at(const SourceModel& source, const Vec3& x, const Constants& c);

// Field = -grad(potential), analytic per variant (arc element fields are
// integrated, never finite-differenced).
Vec3 field_at(const SourceModel& source, const Vec3& x, const Constants& c);

// Distance from x to the nearest singular support point (point-mass position
// or arc material). Infinity for uniform fields.
double min_singular_distance(const SourceModel& source, const Vec3& x);

// Total signed charge (sum of masses for gravity).
double total_charge(const SourceModel& source);

// Anchor point for pair geometry: point position, ring center, or the
// charge-weighted centroid of a composite.
Vec3 source_anchor(const SourceModel& source);

struct QuadratureSpec {
    double domain_radius = 0.0;     // m; 0 = auto (1e8 x pair separation)
    int radial_cells = 8;           // Gauss order per radial panel
    int angular_cells = 8;          // Gauss order per polar panel
    double exclusion_radius = 0.0;  // m; 0 = auto (1e-5 x pair separation)
    double rel_tol = 1e-7;

    void validate() const;
};

struct EnergyResult {
    double value = 0.0;             // J
    double achieved_rel_tol = 0.0;
    bool self_energy_removed = true;
};

// Cross term of the field-energy integral between two disjoint sources:
//   E = 2 sigma Int F_a . F_b dV,  sigma = sign/(8 pi kappa),
// integrated on a spherical product grid centered on the pair midpoint with
// radial panels graded toward both near zones and 1/r-mapped panels out to
// the domain cutoff. Self energies never enter the integrand. The domain
// truncation and exclusion-ball remainders are bounded analytically and
// folded into achieved_rel_tol.
EnergyResult interaction_energy(const SourceModel& a, const SourceModel& b,
                                const QuadratureSpec& q, const Constants& c);

}  // namespace gravphase
