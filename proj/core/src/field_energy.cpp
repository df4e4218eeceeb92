#include <algorithm>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "gravphase/errors.hpp"
#include "gravphase/quadrature.hpp"
#include "gravphase/sources.hpp"

// Field-energy cross term between two disjoint sources.
//
// Geometry of the grid: spherical coordinates about the pair midpoint, polar
// axis along the pair separation. Radial panels are graded geometrically
// toward the sphere r = r0/2 that carries both singular points; polar panels
// (in t = cos theta) are graded toward both poles, where those points sit.
// Outside 2 r0 the radius is mapped through u = 1/r, which makes the r^-4
// far-field integrand a smooth polynomial in u, so the cutoff can sit at
// ~1e8 r0 for the cost of a few extra panels.
//
// Remainders folded into achieved_rel_tol rather than corrected:
//  - truncation beyond the domain radius R: |tail| <= 8 pi |sigma| kappa^2
//    |Qa Qb| / R (angular average of the product field decays as r^-4);
//  - excised exclusion balls: the spherically symmetric near field integrates
//    to zero against the smooth partner field through second order, leaving
//    O((eps/r0)^3).

namespace gravphase {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct PanelGrid {
    std::vector<double> radial_edges;       // [0, 2 r0]
    std::vector<double> inverse_edges;      // u = 1/r panels, descending r
    std::vector<double> polar_edges;        // t = cos theta in [-1, 1]
};

PanelGrid build_grid(double r0, double eps, double domain_radius) {
    PanelGrid grid;
    auto& re = grid.radial_edges;
    re = {0.0, r0 / 8.0, r0 / 4.0};
    const int j_max = std::max(2, static_cast<int>(std::ceil(std::log2((r0 / 4.0) / eps))));
    for (int j = 1; j <= j_max; ++j) re.push_back(r0 / 2.0 - (r0 / 4.0) * std::pow(2.0, -j));
    for (int j = j_max; j >= 1; --j) re.push_back(r0 / 2.0 + (r0 / 4.0) * std::pow(2.0, -j));
    re.push_back(0.75 * r0);
    re.push_back(r0);
    re.push_back(1.5 * r0);
    re.push_back(2.0 * r0);

    const int n_out = std::max(1, static_cast<int>(std::ceil(std::log2(domain_radius / (2.0 * r0)))));
    grid.inverse_edges.resize(static_cast<std::size_t>(n_out) + 1);
    for (int i = 0; i <= n_out; ++i)
        grid.inverse_edges[static_cast<std::size_t>(i)] =
            std::min(2.0 * r0 * std::pow(2.0, i), domain_radius);

    // Polar grading: the pole-adjacent scale goes as (eps/r0)^2.
    std::vector<double> half{0.0};
    for (int j = 1; j <= 2 * j_max; ++j) half.push_back(1.0 - std::pow(2.0, -j));
    half.push_back(1.0);
    auto& te = grid.polar_edges;
    for (auto it = half.rbegin(); it != half.rend(); ++it) te.push_back(-*it);
    for (std::size_t i = 1; i < half.size(); ++i) te.push_back(half[i]);
    return grid;
}

struct Kernel {
    const SourceModel& a;
    const SourceModel& b;
    const Constants& c;
    Vec3 origin;   // pair midpoint
    Vec3 axis;     // unit vector from a toward b
    double eps;

    double operator()(double r, double t, double phi) const {
        const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
        // Orthonormal triad completing the polar axis.
        const Vec3 ex = std::abs(axis.z) > 0.9
                            ? axis.cross(Vec3{1.0, 0.0, 0.0}).normalized()
                            : axis.cross(Vec3{0.0, 0.0, 1.0}).normalized();
        const Vec3 ey = axis.cross(ex);
        const Vec3 x = origin + axis * (r * t) +
                       (ex * std::cos(phi) + ey * std::sin(phi)) * (r * s);
        if (min_singular_distance(a, x) < eps || min_singular_distance(b, x) < eps)
            return 0.0;
        return field_at(a, x, c).dot(field_at(b, x, c));
    }
};

// Axisymmetric fast path: both sources are points on the axis, so the
// azimuthal integral is a factor 2 pi and the field product has a closed
// per-node expression.
struct PointPairKernel {
    double za, zb;     // axial source coordinates about the midpoint
    double strength;   // sign_a sign_b kappa_a kappa_b qa qb
    double eps;

    double operator()(double r, double t) const {
        const double s2 = std::max(0.0, 1.0 - t * t);
        const double z = r * t;
        const double rho2 = r * r * s2;
        const double da2 = rho2 + (z - za) * (z - za);
        const double db2 = rho2 + (z - zb) * (z - zb);
        const double da = std::sqrt(da2), db = std::sqrt(db2);
        if (da < eps || db < eps) return 0.0;
        const double dot = rho2 + (z - za) * (z - zb);
        return strength * dot / (da2 * da * db2 * db);
    }
};

bool is_point(const SourceModel& m) {
    return std::holds_alternative<PointMass>(m.shape);
}

bool involves_uniform(const SourceModel& m) {
    if (std::holds_alternative<UniformField>(m.shape)) return true;
    if (const auto* comp = std::get_if<Composite>(&m.shape))
        for (const auto& part : comp->parts)
            if (involves_uniform(part)) return true;
    return false;
}

// Flattened node/weight lists for one pass; built once per Gauss order.
struct FlatNodes {
    std::vector<double> radius, radial_weight;  // weight includes r^2 (dV factor)
    std::vector<double> polar, polar_weight;
};

FlatNodes flatten(const PanelGrid& grid, int nr, int nt) {
    const auto& rule_r = gauss::legendre(nr);
    const auto& rule_t = gauss::legendre(nt);
    FlatNodes flat;
    for (std::size_t i = 0; i + 1 < grid.radial_edges.size(); ++i) {
        const double mid = 0.5 * (grid.radial_edges[i] + grid.radial_edges[i + 1]);
        const double hw = 0.5 * (grid.radial_edges[i + 1] - grid.radial_edges[i]);
        for (std::size_t q = 0; q < rule_r.nodes.size(); ++q) {
            const double r = mid + hw * rule_r.nodes[q];
            flat.radius.push_back(r);
            flat.radial_weight.push_back(rule_r.weights[q] * hw * r * r);
        }
    }
    for (std::size_t i = 0; i + 1 < grid.inverse_edges.size(); ++i) {
        const double ua = 1.0 / grid.inverse_edges[i + 1];
        const double ub = 1.0 / grid.inverse_edges[i];
        const double mid = 0.5 * (ua + ub), hw = 0.5 * (ub - ua);
        for (std::size_t q = 0; q < rule_r.nodes.size(); ++q) {
            const double u = mid + hw * rule_r.nodes[q];
            const double r = 1.0 / u;
            flat.radius.push_back(r);
            flat.radial_weight.push_back(rule_r.weights[q] * hw * (r * r) / (u * u));
        }
    }
    for (std::size_t j = 0; j + 1 < grid.polar_edges.size(); ++j) {
        const double mid = 0.5 * (grid.polar_edges[j] + grid.polar_edges[j + 1]);
        const double hw = 0.5 * (grid.polar_edges[j + 1] - grid.polar_edges[j]);
        for (std::size_t q = 0; q < rule_t.nodes.size(); ++q) {
            flat.polar.push_back(mid + hw * rule_t.nodes[q]);
            flat.polar_weight.push_back(rule_t.weights[q] * hw);
        }
    }
    return flat;
}

// One full pass over the panel grid at the given Gauss orders; deterministic
// accumulation order (radial-major).
template <typename F2D>
double integrate_axisymmetric(const PanelGrid& grid, const F2D& kernel, int nr, int nt) {
    const FlatNodes flat = flatten(grid, nr, nt);
    double total = 0.0;
    for (std::size_t i = 0; i < flat.radius.size(); ++i) {
        const double r = flat.radius[i];
        double shell = 0.0;
        for (std::size_t j = 0; j < flat.polar.size(); ++j)
            shell += flat.polar_weight[j] * kernel(r, flat.polar[j]);
        total += flat.radial_weight[i] * shell;
    }
    return 2.0 * kPi * total;
}

template <typename F3D>
double integrate_general(const PanelGrid& grid, const F3D& kernel, int nr, int nt,
                         int n_phi) {
    const double dphi = 2.0 * kPi / n_phi;  // periodic trapezoid
    auto folded = [&](double r, double t) {
        double acc = 0.0;
        for (int p = 0; p < n_phi; ++p) acc += kernel(r, t, dphi * (p + 0.5));
        return acc * dphi / (2.0 * kPi);
    };
    return integrate_axisymmetric(
        grid, [&](double r, double t) { return folded(r, t); }, nr, nt);
}

}  // namespace

EnergyResult interaction_energy(const SourceModel& a_in, const SourceModel& b_in,
                                const QuadratureSpec& q_in, const Constants& c) {
    QuadratureSpec q = q_in;
    q.validate();
    a_in.validate();
    b_in.validate();

    // A uniform field dotted with any localized source field integrates to
    // zero shell-by-shell about the localized source; with self energies
    // removed the cross term vanishes identically.
    if (involves_uniform(a_in) || involves_uniform(b_in))
        return {0.0, 0.0, true};

    // Canonical argument order keeps interaction_energy(a, b) and (b, a) on
    // bit-identical quadrature nodes.
    const Vec3 anchor_a = source_anchor(a_in);
    const Vec3 anchor_b = source_anchor(b_in);
    const bool swap = std::lexicographical_compare(
        &anchor_b.x, &anchor_b.x + 3, &anchor_a.x, &anchor_a.x + 3);
    const SourceModel& a = swap ? b_in : a_in;
    const SourceModel& b = swap ? a_in : b_in;
    const Vec3 pa = swap ? anchor_b : anchor_a;
    const Vec3 pb = swap ? anchor_a : anchor_b;

    if (a.coupling.kind != b.coupling.kind ||
        a.coupling.kappa(c) != b.coupling.kappa(c))
        throw ValidationError("interaction_energy: sources must share one coupling");

    const double r0 = (pb - pa).norm();
    if (!(r0 > 0.0))
        throw GeometryError("interaction_energy: sources share an anchor point");

    const double eps = q.exclusion_radius > 0.0 ? q.exclusion_radius : 1e-4 * r0;
    const double domain = q.domain_radius > 0.0 ? q.domain_radius : 1e8 * r0;
    if (domain < 10.0 * r0)
        throw ValidationError(
            "interaction_energy: domain_radius must exceed 10x the pair separation");
    const double min_gap = std::min(min_singular_distance(a, pb),
                                    min_singular_distance(b, pa));
    if (min_gap <= 2.0 * eps)
        throw GeometryError("interaction_energy: sources closer than twice the "
                            "exclusion radius");

    const double kappa_a = a.coupling.kappa(c);
    const double kappa_b = b.coupling.kappa(c);
    // sigma = sign/(8 pi kappa) applies to |F|^2; the cross term carries 2 sigma.
    const double sigma2 = a.coupling.sign() / (4.0 * kPi * kappa_a);

    const PanelGrid grid = build_grid(r0, eps, domain);
    const Vec3 origin = (pa + pb) * 0.5;
    const Vec3 axis = (pb - pa) / r0;

    const bool axisym = is_point(a) && is_point(b);
    auto run = [&](int nr, int nt) {
        if (axisym) {
            const double strength = a.coupling.sign() * b.coupling.sign() * kappa_a *
                                    kappa_b * std::get<PointMass>(a.shape).mass *
                                    std::get<PointMass>(b.shape).mass;
            PointPairKernel kernel{(pa - origin).dot(axis), (pb - origin).dot(axis),
                                   strength, eps};
            return sigma2 * integrate_axisymmetric(grid, kernel, nr, nt);
        }
        Kernel kernel{a, b, c, origin, axis, eps};
        const int n_phi = std::max(16, 4 * nt);
        return sigma2 * integrate_general(grid, kernel, nr, nt, n_phi);
    };

    int nr = q.radial_cells, nt = q.angular_cells;
    double prev = run(nr, nt);
    double refine_delta = std::abs(prev);
    constexpr int kMaxOrder = 256;
    while (true) {
        const int nr2 = 2 * nr, nt2 = 2 * nt;
        if (nr2 > kMaxOrder)
            throw ConvergenceError("interaction_energy: no convergence by Gauss order 256",
                                   prev, prev);
        const double next = run(nr2, nt2);
        refine_delta = std::abs(next - prev);
        const double scale = std::max(std::abs(next), std::abs(prev));
        if (refine_delta == 0.0 || refine_delta < q.rel_tol * scale) {
            prev = next;
            break;
        }
        prev = next;
        nr = nr2;
        nt = nt2;
    }

    const double qq = std::abs(total_charge(a) * total_charge(b));
    const double tail_bound = 8.0 * kPi * std::abs(sigma2 / 2.0) * kappa_a * kappa_b * qq / domain;
    const double excision_bound =
        10.0 * std::abs(sigma2) * kappa_a * kappa_b * qq / r0 * std::pow(eps / r0, 3);
    const double scale = std::max(std::abs(prev), 1e-300);
    EnergyResult result;
    result.value = prev;
    result.achieved_rel_tol =
        refine_delta / scale + tail_bound / scale + excision_bound / scale;
    result.self_energy_removed = true;

    const bool both_gravity = a.coupling.kind == Coupling::Kind::gravity &&
                              b.coupling.kind == Coupling::Kind::gravity;
    if (both_gravity && !(result.value < 0.0))
        throw ConsistencyError(
            "interaction_energy: gravitational cross term must be negative");
    return result;
}

}  // namespace gravphase
