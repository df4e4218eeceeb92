#include "gravphase/sources.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gravphase/errors.hpp"
#include "gravphase/quadrature.hpp"

namespace gravphase {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSingularDistance = 1e-12;  // m
constexpr double kArcTol = 1e-10;

struct ArcFrame {
    Vec3 e1, e2, n;
};

ArcFrame arc_frame(const RingArc& ring) {
    auto [e1, e2] = arc_basis(ring.normal);
    return {e1, e2, ring.normal};
}

Vec3 arc_point(const RingArc& ring, const ArcFrame& f, double phi) {
    return ring.center + (f.e1 * std::cos(phi) + f.e2 * std::sin(phi)) * ring.radius;
}

// Gauss quadrature of fn over the arc, doubling the order until stable.
template <typename Fn>
auto arc_integrate(const RingArc& ring, Fn&& fn) {
    const ArcFrame frame = arc_frame(ring);
    const double phi0 = ring.arc_phase - 0.5 * ring.arc_span;
    const double half = 0.5 * ring.arc_span;
    auto evaluate = [&](int order) {
        const auto& rule = gauss::legendre(order);
        decltype(fn(Vec3{})) acc{};
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double phi = phi0 + half * (1.0 + rule.nodes[i]);
            acc += fn(arc_point(ring, frame, phi)) * (rule.weights[i] * half);
        }
        // Normalized by span: weights integrate d(phi)/span times span -> the
        // caller supplies per-unit-mass kernels scaled by ring.mass outside.
        return acc;
    };
    auto prev = evaluate(64);
    for (int order = 128; order <= 1024; order *= 2) {
        auto next = evaluate(order);
        double diff = std::abs((next - prev) * (1.0 / ring.arc_span));
        double scale = std::max(std::abs(next), std::abs(prev)) / ring.arc_span;
        if (diff <= kArcTol * std::max(scale, 1.0)) return next;
        prev = next;
    }
    return prev;
}

// Vec3 variant of the adaptive arc quadrature.
template <typename Fn>
Vec3 arc_integrate_vec(const RingArc& ring, Fn&& fn) {
    const ArcFrame frame = arc_frame(ring);
    const double phi0 = ring.arc_phase - 0.5 * ring.arc_span;
    const double half = 0.5 * ring.arc_span;
    auto evaluate = [&](int order) {
        const auto& rule = gauss::legendre(order);
        Vec3 acc{};
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double phi = phi0 + half * (1.0 + rule.nodes[i]);
            acc += fn(arc_point(ring, frame, phi)) * (rule.weights[i] * half);
        }
        return acc;
    };
    Vec3 prev = evaluate(64);
    for (int order = 128; order <= 1024; order *= 2) {
        Vec3 next = evaluate(order);
        double diff = (next - prev).norm() / ring.arc_span;
        double scale = std::max(next.norm(), prev.norm()) / ring.arc_span;
        if (diff <= kArcTol * std::max(scale, 1.0)) return next;
        prev = next;
    }
    return prev;
}

}  // namespace

double Coupling::kappa(const Constants& c) const {
    switch (kind) {
        case Kind::gravity: return c.G;
        case Kind::em: return 1.0 / (4.0 * kPi * c.eps0);
        case Kind::custom: return custom_constant;
    }
    throw ValidationError("Coupling: unknown kind");
}

std::pair<Vec3, Vec3> arc_basis(const Vec3& normal) {
    const Vec3 pick = std::abs(normal.z) > 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 0.0, 1.0};
    const Vec3 e1 = normal.cross(pick).normalized();
    const Vec3 e2 = normal.cross(e1);
    return {e1, e2};
}

SourceModel SourceModel::point(double mass, const Vec3& position, Coupling coupling) {
    SourceModel m{PointMass{mass, position}, coupling};
    m.validate();
    return m;
}

SourceModel SourceModel::ring(const RingArc& ring, Coupling coupling) {
    SourceModel m{ring, coupling};
    m.validate();
    return m;
}

SourceModel SourceModel::uniform(const Vec3& g) {
    SourceModel m{UniformField{g}, Coupling{}};
    m.validate();
    return m;
}

SourceModel SourceModel::composite(std::vector<SourceModel> parts) {
    SourceModel m{Composite{std::move(parts)}, Coupling{}};
    if (!std::get<Composite>(m.shape).parts.empty())
        m.coupling = std::get<Composite>(m.shape).parts.front().coupling;
    m.validate();
    return m;
}

void SourceModel::validate(int depth) const {
    if (depth > 4) throw ValidationError("SourceModel: composite nesting depth > 4");
    if (const auto* p = std::get_if<PointMass>(&shape)) {
        if (coupling.kind == Coupling::Kind::gravity) {
            if (!(p->mass > 0.0))
                throw ValidationError("SourceModel: point mass must be strictly positive");
        } else if (p->mass == 0.0 || !std::isfinite(p->mass)) {
            throw ValidationError("SourceModel: point charge must be finite and nonzero");
        }
        if (!p->position.finite())
            throw ValidationError("SourceModel: point position must be finite");
    } else if (const auto* r = std::get_if<RingArc>(&shape)) {
        if (coupling.kind == Coupling::Kind::gravity && !(r->mass > 0.0))
            throw ValidationError("SourceModel: ring mass must be strictly positive");
        if (!(r->radius > 0.0))
            throw ValidationError("SourceModel: ring radius must be strictly positive");
        if (!(r->arc_span > 0.0) || r->arc_span > 2.0 * kPi + 1e-12)
            throw ValidationError("SourceModel: arc_span must lie in (0, 2*pi]");
        if (std::abs(r->normal.norm() - 1.0) > 1e-12)
            throw ValidationError("SourceModel: ring normal must be unit length");
    } else if (const auto* u = std::get_if<UniformField>(&shape)) {
        if (!u->g.finite())
            throw ValidationError("SourceModel: uniform field must be finite");
    } else if (const auto* comp = std::get_if<Composite>(&shape)) {
        if (comp->parts.empty())
            throw ValidationError("SourceModel: composite needs at least one leaf");
        for (const auto& part : comp->parts) {
            if (part.coupling.kind != coupling.kind)
                throw ValidationError("SourceModel: composite parts must share one coupling");
            part.validate(depth + 1);
        }
    }
}

double potential_at(const SourceModel& source, const Vec3& x, const Constants& c) {
    const double kappa = source.coupling.kappa(c);
    const double sign = source.coupling.sign();
    if (const auto* p = std::get_if<PointMass>(&source.shape)) {
        const double r = (x - p->position).norm();
        if (r < kSingularDistance)
            throw SingularityError("potential_at: evaluation at a point-mass location");
        return sign * kappa * p->mass / r;
    }
    if (const auto* ring = std::get_if<RingArc>(&source.shape)) {
        if (min_singular_distance(source, x) < kSingularDistance)
            throw SingularityError("potential_at: evaluation on the ring arc");
        const double density = ring->mass / ring->arc_span;  // charge per radian
        const double integral = arc_integrate(*ring, [&](const Vec3& q) {
            return 1.0 / (x - q).norm();
        });
        return sign * kappa * density * integral;
    }
    if (const auto* u = std::get_if<UniformField>(&source.shape)) {
        // Potential for a uniform field, gauged to zero at the origin.
        return -u->g.dot(x);
    }
    const auto& comp = std::get<Composite>(source.shape);
    double sum = 0.0;
    for (const auto& part : comp.parts) sum += potential_at(part, x, c);
    return sum;
}

Vec3 field_at(const SourceModel& source, const Vec3& x, const Constants& c) {
    const double kappa = source.coupling.kappa(c);
    const double sign = source.coupling.sign();
    if (const auto* p = std::get_if<PointMass>(&source.shape)) {
        const Vec3 d = x - p->position;
        const double r = d.norm();
        if (r < kSingularDistance)
            throw SingularityError("field_at: evaluation at a point-mass location");
        return d * (sign * kappa * p->mass / (r * r * r));
    }
    if (const auto* ring = std::get_if<RingArc>(&source.shape)) {
        if (min_singular_distance(source, x) < kSingularDistance)
            throw SingularityError("field_at: evaluation on the ring arc");
        const double density = ring->mass / ring->arc_span;
        const Vec3 integral = arc_integrate_vec(*ring, [&](const Vec3& q) {
            const Vec3 d = x - q;
            const double r = d.norm();
            return d * (1.0 / (r * r * r));
        });
        return integral * (sign * kappa * density);
    }
    if (const auto* u = std::get_if<UniformField>(&source.shape)) return u->g;
    const auto& comp = std::get<Composite>(source.shape);
    Vec3 sum{};
    for (const auto& part : comp.parts) sum += field_at(part, x, c);
    return sum;
}

double min_singular_distance(const SourceModel& source, const Vec3& x) {
    if (const auto* p = std::get_if<PointMass>(&source.shape))
        return (x - p->position).norm();
    if (const auto* ring = std::get_if<RingArc>(&source.shape)) {
        // Distance to the arc set: project into the ring frame and clamp the
        // azimuth to the covered span.
        const ArcFrame f = arc_frame(*ring);
        const Vec3 rel = x - ring->center;
        const double u = rel.dot(f.e1);
        const double v = rel.dot(f.e2);
        double phi = std::atan2(v, u) - ring->arc_phase;
        while (phi > kPi) phi -= 2.0 * kPi;
        while (phi < -kPi) phi += 2.0 * kPi;
        const double half = 0.5 * ring->arc_span;
        const double clamped = std::clamp(phi, -half, half) + ring->arc_phase;
        const Vec3 nearest = arc_point(*ring, f, clamped);
        return (x - nearest).norm();
    }
    if (std::holds_alternative<UniformField>(source.shape))
        return std::numeric_limits<double>::infinity();
    const auto& comp = std::get<Composite>(source.shape);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& part : comp.parts)
        best = std::min(best, min_singular_distance(part, x));
    return best;
}

double total_charge(const SourceModel& source) {
    if (const auto* p = std::get_if<PointMass>(&source.shape)) return p->mass;
    if (const auto* ring = std::get_if<RingArc>(&source.shape)) return ring->mass;
    if (std::holds_alternative<UniformField>(source.shape)) return 0.0;
    const auto& comp = std::get<Composite>(source.shape);
    double sum = 0.0;
    for (const auto& part : comp.parts) sum += total_charge(part);
    return sum;
}

Vec3 source_anchor(const SourceModel& source) {
    if (const auto* p = std::get_if<PointMass>(&source.shape)) return p->position;
    if (const auto* ring = std::get_if<RingArc>(&source.shape)) return ring->center;
    if (std::holds_alternative<UniformField>(source.shape))
        throw GeometryError("source_anchor: uniform field has no anchor point");
    const auto& comp = std::get<Composite>(source.shape);
    Vec3 weighted{};
    double total = 0.0;
    for (const auto& part : comp.parts) {
        const double q = std::abs(total_charge(part));
        weighted += source_anchor(part) * q;
        total += q;
    }
    if (!(total > 0.0)) throw GeometryError("source_anchor: composite has zero charge");
    return weighted / total;
}

void QuadratureSpec::validate() const {
    if (domain_radius < 0.0)
        throw ValidationError("QuadratureSpec: domain_radius must be >= 0");
    if (exclusion_radius < 0.0)
        throw ValidationError("QuadratureSpec: exclusion_radius must be >= 0");
    if (radial_cells < 2 || angular_cells < 2)
        throw ValidationError("QuadratureSpec: cell counts must be >= 2");
    if (!(rel_tol > 0.0) || rel_tol > 1e-2)
        throw ValidationError("QuadratureSpec: rel_tol must be in (0, 1e-2]");
}

}  // namespace gravphase
