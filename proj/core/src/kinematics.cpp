#include "gravphase/kinematics.hpp"

#include <cmath>
#include <string>

#include "gravphase/errors.hpp"

namespace gravphase {

void InterferometerSpec::validate() const {
    if (!(m > 0.0)) throw ValidationError("InterferometerSpec: m must be positive");
    if (!(M > 0.0)) throw ValidationError("InterferometerSpec: M must be positive");
    if (!(M_detector > 0.0))
        throw ValidationError("InterferometerSpec: M_D must be positive");
    if (!(k > 0.0)) throw ValidationError("InterferometerSpec: k must be positive");
    if (!(T > 0.0)) throw ValidationError("InterferometerSpec: T must be positive");
    if (!(P1 >= 0.0 && P1 <= 1.0))
        throw ValidationError("InterferometerSpec: P1 must lie in [0, 1]");
    if (!x0.finite() || !xs0.finite() || !a_src.finite())
        throw ValidationError("InterferometerSpec: positions must be finite");
}

double InterferometerSpec::pulse_time_for_separation(double separation, double m,
                                                     double k, const Constants& c) {
    if (!(separation > 0.0))
        throw ValidationError("pulse_time_for_separation: separation must be positive");
    return separation * m / (2.0 * c.hbar * k);
}

std::pair<Trajectory, Trajectory> mach_zehnder_arms(const InterferometerSpec& spec,
                                                    const Constants& c) {
    spec.validate();
    const double v = spec.arm_speed(c);
    const Vec3 vk = kKickAxis * v;

    auto arm = [&](double direction) {
        AnalyticSegment first;
        first.t_begin = 0.0;
        first.t_end = spec.T;
        first.t_ref = 0.0;
        first.x_ref = spec.x0;
        first.v_ref = vk * direction;
        AnalyticSegment second;
        second.t_begin = spec.T;
        second.t_end = 2.0 * spec.T;
        second.t_ref = 2.0 * spec.T;  // anchored at closure, so x(2T) = x0 exactly
        second.x_ref = spec.x0;
        second.v_ref = vk * (-direction);
        return Trajectory::analytic({first, second});
    };
    return {arm(+1.0), arm(-1.0)};
}

Trajectory parabolic_source(const InterferometerSpec& spec) {
    spec.validate();
    AnalyticSegment seg;
    seg.t_begin = 0.0;
    seg.t_end = 2.0 * spec.T;
    seg.t_ref = spec.T;  // vertex form, exact apex at t = T
    seg.x_ref = spec.xs0;
    seg.a_ref = spec.a_src;
    return Trajectory::analytic({seg});
}

std::pair<std::complex<double>, std::complex<double>> beamsplitter_amplitudes(double P1) {
    if (!(P1 >= 0.0 && P1 <= 1.0))
        throw ValidationError("beamsplitter_amplitudes: P1 must lie in [0, 1]");
    return {std::complex<double>(std::sqrt(P1), 0.0),
            std::complex<double>(std::sqrt(1.0 - P1), 0.0)};
}

namespace {

// The common deflection and its rate; the kick-only tent parts of the arms
// are carried analytically.
struct Deflection {
    Vec3 d, dv;
};

struct RawEvolution {
    std::vector<Vec3> pos1, pos2, vel1, vel2, accel, delta, delta_vel;
    Vec3 vel1_pre{}, vel2_pre{};
    double max_energy_drift = 0.0;
};

RawEvolution integrate(const InterferometerSpec& spec, const SourceModel& source,
                       int steps, const Constants& c, double min_source_distance) {
    const double h = 2.0 * spec.T / steps;
    const int half = steps / 2;
    const double v = spec.arm_speed(c);
    const Vec3 vk = kKickAxis * v;
    const double P1 = spec.P1, P2 = 1.0 - spec.P1;

    auto tent = [&](double t) { return std::min(t, 2.0 * spec.T - t); };
    auto source_pos = [&](double t) {
        const double dt = t - spec.T;
        return spec.xs0 + spec.a_src * (0.5 * dt * dt);
    };
    // Kick-only arm paths (exact) and the resulting center of mass.
    auto free_cm = [&](double t) {
        return spec.x0 + vk * ((P1 - P2) * tent(t));
    };
    auto accel_at = [&](double t, const Vec3& d) {
        return field_at(source, free_cm(t) + d - source_pos(t), c);
    };
    auto check_proximity = [&](double t, const Vec3& d) {
        const Vec3 xs = source_pos(t);
        const Vec3 x1 = spec.x0 + vk * tent(t) + d;
        const Vec3 x2 = spec.x0 - vk * tent(t) + d;
        if (std::min(min_singular_distance(source, x1 - xs),
                     min_singular_distance(source, x2 - xs)) < min_source_distance)
            throw ProximityError(
                "semiclassical_evolve: arm within " + std::to_string(min_source_distance) +
                " m of the source at t = " + std::to_string(t));
    };

    RawEvolution out;
    out.pos1.reserve(static_cast<std::size_t>(steps) + 1);
    Deflection s{Vec3{}, Vec3{}};

    double work = 0.0;  // running integral of a . delta_vel
    auto record = [&](double t, const Deflection& st, int i) {
        const Vec3 a = accel_at(t, st.d);
        const double slope = i <= half ? 1.0 : -1.0;
        out.pos1.push_back(spec.x0 + vk * tent(t) + st.d);
        out.pos2.push_back(spec.x0 - vk * tent(t) + st.d);
        out.vel1.push_back(vk * slope + st.dv);
        out.vel2.push_back(vk * (-slope) + st.dv);
        out.delta.push_back(st.d);
        out.delta_vel.push_back(st.dv);
        out.accel.push_back(a);
        return a;
    };

    Vec3 a_prev = record(0.0, s, 0);

    for (int i = 0; i < steps; ++i) {
        const double t = h * i;
        if (i == half) {
            // The kick lives in the analytic tent; record the pre-kick arm
            // velocities and flip the stored node to post-kick.
            out.vel1_pre = vk + s.dv;
            out.vel2_pre = -vk + s.dv;
            out.vel1.back() = -vk + s.dv;
            out.vel2.back() = vk + s.dv;
        }
        check_proximity(t, s.d);

        auto deriv = [&](double tau, const Deflection& st) {
            return Deflection{st.dv, accel_at(tau, st.d)};
        };
        auto add = [](const Deflection& st, const Deflection& k, double f) {
            return Deflection{st.d + k.d * f, st.dv + k.dv * f};
        };
        const Deflection k1 = deriv(t, s);
        const Deflection k2 = deriv(t + 0.5 * h, add(s, k1, 0.5 * h));
        const Deflection k3 = deriv(t + 0.5 * h, add(s, k2, 0.5 * h));
        const Deflection k4 = deriv(t + h, add(s, k3, h));
        const Vec3 dv_before = s.dv;
        s.d += (k1.d + k2.d * 2.0 + k3.d * 2.0 + k4.d) * (h / 6.0);
        s.dv += (k1.dv + k2.dv * 2.0 + k3.dv * 2.0 + k4.dv) * (h / 6.0);

        const Vec3 a_now = record(t + h, s, i + 1);
        work += 0.5 * h * (a_prev.dot(dv_before) + a_now.dot(s.dv));
        a_prev = a_now;
        out.max_energy_drift =
            std::max(out.max_energy_drift, std::abs(0.5 * s.dv.norm2() - work));
    }
    check_proximity(2.0 * spec.T, s.d);
    return out;
}

}  // namespace

SemiclassicalEvolution semiclassical_evolve(const InterferometerSpec& spec,
                                            const SourceModel& source, int steps,
                                            const Constants& c,
                                            double min_source_distance) {
    spec.validate();
    source.validate();
    if (steps < 1000 || steps % 4 != 0)
        throw ValidationError(
            "semiclassical_evolve: steps must be >= 1000 and divisible by 4");

    RawEvolution fine = integrate(spec, source, steps, c, min_source_distance);
    RawEvolution coarse = integrate(spec, source, steps / 2, c, min_source_distance);
    const double end_disagreement =
        (fine.delta.back() - coarse.delta.back()).norm();
    if (end_disagreement > 1e-9)
        throw AccuracyError("semiclassical_evolve: step-halving disagreement " +
                                std::to_string(end_disagreement) + " m at 2T",
                            coarse.delta.back().z, fine.delta.back().z);

    SemiclassicalEvolution evo;
    evo.step_count = steps;
    evo.dt = 2.0 * spec.T / steps;
    evo.max_energy_drift = fine.max_energy_drift;
    evo.pos1 = std::move(fine.pos1);
    evo.pos2 = std::move(fine.pos2);
    evo.vel1 = std::move(fine.vel1);
    evo.vel2 = std::move(fine.vel2);
    evo.accel = std::move(fine.accel);
    evo.delta = std::move(fine.delta);
    evo.delta_vel = std::move(fine.delta_vel);
    evo.vel1_pre_kick = fine.vel1_pre;
    evo.vel2_pre_kick = fine.vel2_pre;

    const int half = steps / 2;
    auto build = [&](const std::vector<Vec3>& pos, const std::vector<Vec3>& vel,
                     const Vec3& pre_kick) {
        SampledSegment first;
        first.t_begin = 0.0;
        first.dt = evo.dt;
        first.positions.assign(pos.begin(), pos.begin() + half + 1);
        first.velocities.assign(vel.begin(), vel.begin() + half + 1);
        first.velocities.back() = pre_kick;
        SampledSegment second;
        second.t_begin = spec.T;
        second.dt = evo.dt;
        second.positions.assign(pos.begin() + half, pos.end());
        second.velocities.assign(vel.begin() + half, vel.end());
        return Trajectory::sampled({first, second});
    };
    evo.x1 = build(evo.pos1, evo.vel1, evo.vel1_pre_kick);
    evo.x2 = build(evo.pos2, evo.vel2, evo.vel2_pre_kick);

    std::vector<Vec3> cm_pos(evo.pos1.size()), cm_vel(evo.pos1.size());
    const double P1 = spec.P1, P2 = 1.0 - spec.P1;
    for (std::size_t i = 0; i < cm_pos.size(); ++i) {
        cm_pos[i] = evo.pos1[i] * P1 + evo.pos2[i] * P2;
        cm_vel[i] = evo.vel1[i] * P1 + evo.vel2[i] * P2;
    }
    const Vec3 cm_pre = evo.vel1_pre_kick * P1 + evo.vel2_pre_kick * P2;
    evo.x_cm = build(cm_pos, cm_vel, cm_pre);
    return evo;
}

}  // namespace gravphase
