#include "gravphase/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gravphase/errors.hpp"

namespace gravphase {

namespace {

constexpr double kContinuityTol = 1e-9;  // m, across piece boundaries

int clamp_index(double t, double t_begin, double dt, int count) {
    int i = static_cast<int>(std::floor((t - t_begin) / dt));
    return std::clamp(i, 0, count - 2);
}

}  // namespace

Vec3 SampledSegment::position(double t) const {
    const int n = static_cast<int>(positions.size());
    const int i = clamp_index(t, t_begin, dt, n);
    const double s = (t - (t_begin + dt * i)) / dt;
    const Vec3& p0 = positions[static_cast<std::size_t>(i)];
    const Vec3& p1 = positions[static_cast<std::size_t>(i + 1)];
    const Vec3 m0 = velocities[static_cast<std::size_t>(i)] * dt;
    const Vec3 m1 = velocities[static_cast<std::size_t>(i + 1)] * dt;
    const double s2 = s * s, s3 = s2 * s;
    return p0 * (2 * s3 - 3 * s2 + 1) + m0 * (s3 - 2 * s2 + s) +
           p1 * (-2 * s3 + 3 * s2) + m1 * (s3 - s2);
}

Vec3 SampledSegment::velocity(double t) const {
    const int n = static_cast<int>(positions.size());
    const int i = clamp_index(t, t_begin, dt, n);
    const double s = (t - (t_begin + dt * i)) / dt;
    const Vec3& p0 = positions[static_cast<std::size_t>(i)];
    const Vec3& p1 = positions[static_cast<std::size_t>(i + 1)];
    const Vec3 m0 = velocities[static_cast<std::size_t>(i)] * dt;
    const Vec3 m1 = velocities[static_cast<std::size_t>(i + 1)] * dt;
    const double s2 = s * s;
    const Vec3 d = p0 * (6 * s2 - 6 * s) + m0 * (3 * s2 - 4 * s + 1) +
                   p1 * (-6 * s2 + 6 * s) + m1 * (3 * s2 - 2 * s);
    return d / dt;
}

Trajectory Trajectory::analytic(std::vector<AnalyticSegment> segments) {
    if (segments.empty())
        throw ValidationError("Trajectory: at least one segment required");
    Trajectory traj;
    traj.analytic_ = std::move(segments);
    traj.t_start_ = traj.analytic_.front().t_begin;
    traj.t_end_ = traj.analytic_.back().t_end;
    traj.check_contiguous();
    return traj;
}

Trajectory Trajectory::sampled(std::vector<SampledSegment> segments) {
    if (segments.empty())
        throw ValidationError("Trajectory: at least one segment required");
    for (const auto& seg : segments) {
        if (seg.positions.size() < 2 || seg.positions.size() != seg.velocities.size())
            throw ValidationError("Trajectory: sampled segment needs >= 2 nodes and "
                                  "matching velocity count");
        if (!(seg.dt > 0.0))
            throw ValidationError("Trajectory: sampled segment dt must be positive");
    }
    Trajectory traj;
    traj.sampled_ = std::move(segments);
    traj.t_start_ = traj.sampled_.front().t_begin;
    traj.t_end_ = traj.sampled_.back().t_end();
    traj.check_contiguous();
    return traj;
}

Trajectory Trajectory::constant(const Vec3& x, double t_begin, double t_end) {
    AnalyticSegment seg;
    seg.t_begin = t_begin;
    seg.t_end = t_end;
    seg.t_ref = t_begin;
    seg.x_ref = x;
    return analytic({seg});
}

void Trajectory::check_contiguous() const {
    auto check = [](double prev_end, double next_begin, const Vec3& a, const Vec3& b) {
        if (std::abs(prev_end - next_begin) > 1e-12)
            throw ValidationError("Trajectory: segments not contiguous in time");
        if ((a - b).norm() > kContinuityTol)
            throw ValidationError("Trajectory: position discontinuity of " +
                                  std::to_string((a - b).norm()) +
                                  " m across segment boundary");
    };
    for (std::size_t i = 1; i < analytic_.size(); ++i)
        check(analytic_[i - 1].t_end, analytic_[i].t_begin,
              analytic_[i - 1].position(analytic_[i - 1].t_end),
              analytic_[i].position(analytic_[i].t_begin));
    for (std::size_t i = 1; i < sampled_.size(); ++i)
        check(sampled_[i - 1].t_end(), sampled_[i].t_begin,
              sampled_[i - 1].positions.back(), sampled_[i].positions.front());
}

Vec3 Trajectory::position(double t) const {
    if (!analytic_.empty()) {
        for (const auto& seg : analytic_)
            if (t <= seg.t_end || &seg == &analytic_.back()) return seg.position(t);
    }
    for (const auto& seg : sampled_)
        if (t <= seg.t_end() || &seg == &sampled_.back()) return seg.position(t);
    throw ValidationError("Trajectory: empty");
}

Vec3 Trajectory::velocity(double t) const {
    if (!analytic_.empty()) {
        for (const auto& seg : analytic_)
            if (t <= seg.t_end || &seg == &analytic_.back()) return seg.velocity(t);
    }
    for (const auto& seg : sampled_)
        if (t <= seg.t_end() || &seg == &sampled_.back()) return seg.velocity(t);
    throw ValidationError("Trajectory: empty");
}

const AnalyticSegment& Trajectory::analytic_segment_at(double t) const {
    for (const auto& seg : analytic_)
        if (t <= seg.t_end || &seg == &analytic_.back()) return seg;
    throw ValidationError("Trajectory: no analytic segment covers t");
}

std::vector<double> Trajectory::breakpoints() const {
    std::vector<double> pts;
    for (std::size_t i = 1; i < analytic_.size(); ++i) pts.push_back(analytic_[i].t_begin);
    for (std::size_t i = 1; i < sampled_.size(); ++i) pts.push_back(sampled_[i].t_begin);
    return pts;
}

Trajectory Trajectory::operator-(const Trajectory& other) const {
    if (std::abs(t_start() - other.t_start()) > 1e-12 ||
        std::abs(t_end() - other.t_end()) > 1e-12)
        throw ValidationError("Trajectory subtraction: time domains differ");

    if (is_analytic() && other.is_analytic()) {
        // Merge breakpoints; on each interval both are single quadratics, so
        // the difference is again a quadratic and the arithmetic is exact.
        // The covering segment is resolved through the interval midpoint:
        // velocities are double-valued at kick edges, positions are not.
        std::vector<double> edges{t_start()};
        for (double b : breakpoints()) edges.push_back(b);
        for (double b : other.breakpoints()) edges.push_back(b);
        edges.push_back(t_end());
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end(),
                                [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
                    edges.end());
        std::vector<AnalyticSegment> segs;
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
            const double tm = 0.5 * (edges[i] + edges[i + 1]);
            const AnalyticSegment& sa = analytic_segment_at(tm);
            const AnalyticSegment& sb = other.analytic_segment_at(tm);
            AnalyticSegment seg;
            seg.t_begin = edges[i];
            seg.t_end = edges[i + 1];
            seg.t_ref = edges[i];
            seg.x_ref = sa.position(edges[i]) - sb.position(edges[i]);
            seg.v_ref = sa.velocity(edges[i]) - sb.velocity(edges[i]);
            seg.a_ref = sa.a_ref - sb.a_ref;
            segs.push_back(seg);
        }
        return analytic(std::move(segs));
    }

    // Sampled fallback: resample both on the union of piece boundaries at the
    // finer of the two native resolutions.
    std::vector<double> edges{t_start()};
    for (double b : breakpoints()) edges.push_back(b);
    for (double b : other.breakpoints()) edges.push_back(b);
    edges.push_back(t_end());
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
                edges.end());
    double dt = (t_end() - t_start()) / 4096.0;
    for (const auto& seg : sampled_) dt = std::min(dt, seg.dt);
    for (const auto& seg : other.sampled_segments()) dt = std::min(dt, seg.dt);
    // Velocities at shared edges are resolved through the piece covering the
    // interval midpoint, as in the analytic branch.
    auto vel_in = [](const Trajectory& traj, double t, double tm) {
        if (traj.is_analytic()) return traj.analytic_segment_at(tm).velocity(t);
        for (const auto& seg : traj.sampled_)
            if (tm <= seg.t_end() || &seg == &traj.sampled_.back())
                return seg.velocity(t);
        throw ValidationError("Trajectory: empty");
    };
    std::vector<SampledSegment> segs;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        SampledSegment seg;
        seg.t_begin = edges[i];
        const double tm = 0.5 * (edges[i] + edges[i + 1]);
        const int count = std::max(2, static_cast<int>(std::ceil((edges[i + 1] - edges[i]) / dt)) + 1);
        seg.dt = (edges[i + 1] - edges[i]) / static_cast<double>(count - 1);
        for (int j = 0; j < count; ++j) {
            const double t = edges[i] + seg.dt * j;
            seg.positions.push_back(position(t) - other.position(t));
            seg.velocities.push_back(vel_in(*this, t, tm) - vel_in(other, t, tm));
        }
        segs.push_back(std::move(seg));
    }
    return sampled(std::move(segs));
}

Trajectory Trajectory::operator-() const {
    Trajectory traj = *this;
    for (auto& seg : traj.analytic_) {
        seg.x_ref = -seg.x_ref;
        seg.v_ref = -seg.v_ref;
        seg.a_ref = -seg.a_ref;
    }
    for (auto& seg : traj.sampled_) {
        for (auto& p : seg.positions) p = -p;
        for (auto& v : seg.velocities) v = -v;
    }
    return traj;
}

Trajectory Trajectory::shifted(const Vec3& offset) const {
    Trajectory traj = *this;
    for (auto& seg : traj.analytic_) seg.x_ref += offset;
    for (auto& seg : traj.sampled_)
        for (auto& p : seg.positions) p += offset;
    return traj;
}

double max_distance(const Trajectory& a, const Trajectory& b, int probes) {
    double worst = 0.0;
    const double t0 = std::max(a.t_start(), b.t_start());
    const double t1 = std::min(a.t_end(), b.t_end());
    for (int i = 0; i < probes; ++i) {
        const double t = t0 + (t1 - t0) * i / static_cast<double>(probes - 1);
        worst = std::max(worst, (a.position(t) - b.position(t)).norm());
    }
    return worst;
}

}  // namespace gravphase
