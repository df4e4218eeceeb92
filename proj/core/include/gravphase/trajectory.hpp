#pragma once

#include <vector>

#include "gravphase/vec3.hpp"

namespace gravphase {

// One closed-form piece: x(t) = x_ref + v_ref (t - t_ref) + a_ref (t - t_ref)^2 / 2.
// Storing the reference time keeps vertex-form parabolas and arm closures exact.
struct AnalyticSegment {
    double t_begin = 0.0;
    double t_end = 0.0;
    double t_ref = 0.0;
    Vec3 x_ref{};
    Vec3 v_ref{};
    Vec3 a_ref{};

    Vec3 position(double t) const {
        const double dt = t - t_ref;
        return x_ref + v_ref * dt + a_ref * (0.5 * dt * dt);
    }
    Vec3 velocity(double t) const { return v_ref + a_ref * (t - t_ref); }
};

// Uniformly sampled piece with node velocities; evaluated by cubic Hermite
// interpolation between nodes.
struct SampledSegment {
    double t_begin = 0.0;
    double dt = 0.0;
    std::vector<Vec3> positions;
    std::vector<Vec3> velocities;

    double t_end() const {
        return t_begin + dt * static_cast<double>(positions.size() - 1);
    }
    Vec3 position(double t) const;
    Vec3 velocity(double t) const;
};

// A time-parameterized path of one particle in a chosen frame. Pieces are
// contiguous in time; position is continuous across piece boundaries while
// velocity may jump there (pulse kicks).
class Trajectory {
  public:
    Trajectory() = default;

    static Trajectory analytic(std::vector<AnalyticSegment> segments);
    static Trajectory sampled(std::vector<SampledSegment> segments);
    // Constant path over [t_begin, t_end].
    static Trajectory constant(const Vec3& x, double t_begin, double t_end);

    double t_start() const { return t_start_; }
    double t_end() const { return t_end_; }

    Vec3 position(double t) const;
    Vec3 velocity(double t) const;

    bool is_analytic() const { return sampled_.empty(); }
    const std::vector<AnalyticSegment>& analytic_segments() const { return analytic_; }
    const std::vector<SampledSegment>& sampled_segments() const { return sampled_; }

    // Piece-boundary times (interior only), where velocity may jump.
    std::vector<double> breakpoints() const;

    // The analytic piece covering t (by upper edge; t should be interior).
    const AnalyticSegment& analytic_segment_at(double t) const;

    Trajectory operator-(const Trajectory& other) const;
    Trajectory operator-() const;
    Trajectory shifted(const Vec3& offset) const;

  private:
    // Exactly one of the two vectors is populated.
    std::vector<AnalyticSegment> analytic_;
    std::vector<SampledSegment> sampled_;
    double t_start_ = 0.0;
    double t_end_ = 0.0;

    void check_contiguous() const;
};

// Max position distance over n uniform probe times; used for branch-path
// equality at the qrf module's 1e-12 m tolerance.
double max_distance(const Trajectory& a, const Trajectory& b, int probes = 33);

}  // namespace gravphase
