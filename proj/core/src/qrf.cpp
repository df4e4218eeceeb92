#include "gravphase/qrf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gravphase/errors.hpp"
#include "gravphase/quadrature.hpp"

namespace gravphase {

namespace {

constexpr double kAmpTol = 1e-12;
constexpr double kRankTol = 1e-10;

Trajectory zero_path_like(const Trajectory& ref) {
    return Trajectory::constant(Vec3{}, ref.t_start(), ref.t_end());
}

// Clusters trajectories by pairwise distance below tol; returns the cluster
// index per input.
std::vector<int> cluster_paths(const std::vector<const Trajectory*>& paths,
                               double tol) {
    std::vector<int> ids(paths.size(), -1);
    std::vector<const Trajectory*> reps;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        for (std::size_t r = 0; r < reps.size(); ++r) {
            if (max_distance(*paths[i], *reps[r]) <= tol) {
                ids[i] = static_cast<int>(r);
                break;
            }
        }
        if (ids[i] < 0) {
            reps.push_back(paths[i]);
            ids[i] = static_cast<int>(reps.size()) - 1;
        }
    }
    return ids;
}

// Rank of a small complex matrix by row reduction with partial pivoting.
int matrix_rank(std::vector<std::vector<std::complex<double>>> m) {
    if (m.empty()) return 0;
    const std::size_t rows = m.size(), cols = m.front().size();
    double scale = 0.0;
    for (const auto& row : m)
        for (const auto& v : row) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return 0;
    int rank = 0;
    std::size_t pivot_row = 0;
    for (std::size_t col = 0; col < cols && pivot_row < rows; ++col) {
        std::size_t best = pivot_row;
        for (std::size_t r = pivot_row + 1; r < rows; ++r)
            if (std::abs(m[r][col]) > std::abs(m[best][col])) best = r;
        if (std::abs(m[best][col]) <= kRankTol * scale) continue;
        std::swap(m[best], m[pivot_row]);
        for (std::size_t r = pivot_row + 1; r < rows; ++r) {
            const std::complex<double> f = m[r][col] / m[pivot_row][col];
            for (std::size_t cc = col; cc < cols; ++cc) m[r][cc] -= f * m[pivot_row][cc];
        }
        ++pivot_row;
        ++rank;
    }
    return rank;
}

}  // namespace

void BranchState::validate() const {
    if (branches.empty()) throw ValidationError("BranchState: no branches");
    if (!has_particle(frame))
        throw ValidationError("BranchState: frame particle '" + frame +
                              "' missing from particle list");
    double norm = 0.0;
    for (const auto& branch : branches) {
        norm += std::norm(branch.amplitude);
        if (branch.paths.count(frame))
            throw ValidationError("BranchState: frame particle must not carry a path");
        for (const auto& [label, path] : branch.paths) {
            if (!has_particle(label))
                throw ValidationError("BranchState: path for unknown particle '" +
                                      label + "'");
            (void)path;
        }
    }
    if (std::abs(norm - 1.0) > kAmpTol)
        throw ValidationError("BranchState: amplitudes not normalized");
}

const ParticleInfo& BranchState::particle(const std::string& label) const {
    for (const auto& p : particles)
        if (p.label == label) return p;
    throw ValidationError("BranchState: unknown particle '" + label + "'");
}

bool BranchState::has_particle(const std::string& label) const {
    for (const auto& p : particles)
        if (p.label == label) return true;
    return false;
}

BranchState qrf_transform(const BranchState& state, const FrameTransform& xf) {
    state.validate();
    if (xf.from_frame != state.frame)
        throw ValidationError("qrf_transform: from_frame does not match state frame");
    if (!state.has_particle(xf.to_frame))
        throw ValidationError("qrf_transform: unknown target frame particle '" +
                              xf.to_frame + "'");
    if (xf.to_frame == state.frame) return state;

    BranchState out;
    out.frame = xf.to_frame;
    out.particles = state.particles;
    out.branches.reserve(state.branches.size());
    for (const auto& branch : state.branches) {
        const auto anchor_it = branch.paths.find(xf.to_frame);
        if (anchor_it == branch.paths.end())
            throw ValidationError("qrf_transform: target particle has no path");
        const Trajectory& anchor = anchor_it->second;

        Branch moved;
        moved.amplitude = branch.amplitude;
        moved.phase = branch.phase;
        for (const auto& [label, path] : branch.paths) {
            if (label == xf.to_frame) continue;
            moved.paths.emplace(label, path - anchor);
        }
        moved.paths.emplace(state.frame, zero_path_like(anchor) - anchor);
        out.branches.push_back(std::move(moved));
    }
    out.validate();
    return out;
}

FieldLabel field_label(const BranchState& state, const Branch& branch) {
    FieldLabel label;
    for (const auto& p : state.particles) {
        if (!p.gravitating) continue;
        if (p.label == state.frame) {
            // The frame particle sits at its own origin.
            double t0 = 0.0, t1 = 1.0;
            if (!branch.paths.empty()) {
                t0 = branch.paths.begin()->second.t_start();
                t1 = branch.paths.begin()->second.t_end();
            }
            label.sources.emplace_back(p.mass, Trajectory::constant(Vec3{}, t0, t1));
        } else {
            const auto it = branch.paths.find(p.label);
            if (it == branch.paths.end())
                throw ValidationError("field_label: gravitating particle '" + p.label +
                                      "' has no path");
            label.sources.emplace_back(p.mass, it->second);
        }
    }
    // Canonical order: by mass, then by initial position components.
    std::sort(label.sources.begin(), label.sources.end(),
              [](const auto& a, const auto& b) {
                  if (a.first != b.first) return a.first < b.first;
                  const Vec3 pa = a.second.position(a.second.t_start());
                  const Vec3 pb = b.second.position(b.second.t_start());
                  return std::lexicographical_compare(&pa.x, &pa.x + 3, &pb.x, &pb.x + 3);
              });
    return label;
}

bool field_labels_equal(const FieldLabel& a, const FieldLabel& b, double tol) {
    if (a.sources.size() != b.sources.size()) return false;
    for (std::size_t i = 0; i < a.sources.size(); ++i) {
        if (a.sources[i].first != b.sources[i].first) return false;
        if (max_distance(a.sources[i].second, b.sources[i].second) > tol) return false;
    }
    return true;
}

EntanglementReport entanglement_partition(const BranchState& state,
                                          const std::vector<std::string>& left) {
    state.validate();
    if (left.empty())
        throw ValidationError("entanglement_partition: left side must not be empty");

    // Subsystems are the non-frame particles; the field pseudo-label "G"
    // joins a side only when listed explicitly.
    std::vector<std::string> right;
    std::vector<std::string> particle_labels;
    for (const auto& p : state.particles)
        if (p.label != state.frame) particle_labels.push_back(p.label);

    for (const auto& label : left) {
        if (label == "G") continue;
        if (std::find(particle_labels.begin(), particle_labels.end(), label) ==
            particle_labels.end())
            throw ValidationError("entanglement_partition: unknown label '" + label +
                                  "' (frame particle is the reference, not a subsystem)");
    }
    for (const auto& label : particle_labels)
        if (std::find(left.begin(), left.end(), label) == left.end())
            right.push_back(label);
    if (right.empty())
        throw ValidationError("entanglement_partition: right side must not be empty");

    // Configuration key per branch and side: cluster ids of each member label.
    auto side_keys = [&](const std::vector<std::string>& side) {
        std::vector<std::vector<int>> keys(state.branches.size());
        for (const auto& label : side) {
            if (label == "G") {
                std::vector<FieldLabel> labels;
                labels.reserve(state.branches.size());
                for (const auto& branch : state.branches)
                    labels.push_back(field_label(state, branch));
                std::vector<int> ids(labels.size(), -1);
                std::vector<int> reps;
                for (std::size_t i = 0; i < labels.size(); ++i) {
                    for (std::size_t r = 0; r < reps.size(); ++r) {
                        if (field_labels_equal(labels[i],
                                               labels[static_cast<std::size_t>(reps[r])])) {
                            ids[i] = static_cast<int>(r);
                            break;
                        }
                    }
                    if (ids[i] < 0) {
                        reps.push_back(static_cast<int>(i));
                        ids[i] = static_cast<int>(reps.size()) - 1;
                    }
                }
                for (std::size_t i = 0; i < keys.size(); ++i) keys[i].push_back(ids[i]);
            } else {
                std::vector<const Trajectory*> paths;
                for (const auto& branch : state.branches) {
                    const auto it = branch.paths.find(label);
                    if (it == branch.paths.end())
                        throw ValidationError("entanglement_partition: particle '" +
                                              label + "' has no path");
                    paths.push_back(&it->second);
                }
                const std::vector<int> ids = cluster_paths(paths, kPathTol);
                for (std::size_t i = 0; i < keys.size(); ++i) keys[i].push_back(ids[i]);
            }
        }
        return keys;
    };

    const auto left_keys = side_keys(left);
    const auto right_keys = side_keys(right);

    auto index_of = [](std::vector<std::vector<int>>& seen,
                       const std::vector<int>& key) {
        for (std::size_t i = 0; i < seen.size(); ++i)
            if (seen[i] == key) return static_cast<int>(i);
        seen.push_back(key);
        return static_cast<int>(seen.size()) - 1;
    };

    std::vector<std::vector<int>> left_configs, right_configs;
    std::vector<std::pair<int, int>> cells(state.branches.size());
    for (std::size_t i = 0; i < state.branches.size(); ++i)
        cells[i] = {index_of(left_configs, left_keys[i]),
                    index_of(right_configs, right_keys[i])};

    std::vector<std::vector<std::complex<double>>> matrix(
        left_configs.size(),
        std::vector<std::complex<double>>(right_configs.size(), {0.0, 0.0}));
    for (std::size_t i = 0; i < state.branches.size(); ++i) {
        const auto& branch = state.branches[i];
        matrix[static_cast<std::size_t>(cells[i].first)]
              [static_cast<std::size_t>(cells[i].second)] +=
            branch.amplitude * std::polar(1.0, branch.phase);
    }

    EntanglementReport report;
    report.left = left;
    report.right = right;
    report.schmidt_rank = std::max(1, matrix_rank(std::move(matrix)));
    report.is_product = report.schmidt_rank == 1;
    return report;
}

PhaseResult phase_in_frame(const BranchState& state, double m, double M,
                           const TimeGrid& grid, const Constants& c,
                           const std::string& test_label,
                           const std::string& source_label) {
    state.validate();
    if (state.branches.size() != 2)
        throw ScenarioError("phase_in_frame: expected exactly two branches, got " +
                            std::to_string(state.branches.size()));
    if (M == 0.0) {
        PhaseResult result;
        result.method = PhaseMethod::potential_integral;
        result.assumptions = {"source removed (M = 0)", "frame: " + state.frame};
        return result;
    }

    // Relative A-B separation per branch from whatever coordinates the frame
    // provides; the frame particle sits at the origin.
    auto relative = [&](const Branch& branch) {
        const bool test_is_frame = test_label == state.frame;
        const bool source_is_frame = source_label == state.frame;
        if (!test_is_frame && !source_is_frame)
            return branch.paths.at(source_label) - branch.paths.at(test_label);
        if (test_is_frame) return branch.paths.at(source_label);
        return -branch.paths.at(test_label);
    };
    const Trajectory rel1 = relative(state.branches[0]);
    const Trajectory rel2 = relative(state.branches[1]);

    auto integrand = [&](double t) {
        const double r1 = rel1.position(t).norm();
        const double r2 = rel2.position(t).norm();
        if (r1 < 1e-9 || r2 < 1e-9)
            throw ProximityError("phase_in_frame: singular approach");
        return (-c.G * m * M / c.hbar) * (1.0 / r1 - 1.0 / r2);
    };
    const double coarse = integrate_time(integrand, grid);
    const double fine = integrate_time(integrand, grid.refined());
    const double scale = std::max({std::abs(coarse), std::abs(fine), 1e-300});

    PhaseResult result;
    result.delta_phi = coarse;
    result.method = PhaseMethod::potential_integral;
    result.quadrature_tol = std::abs(fine - coarse) / scale;
    result.assumptions = {"frame: " + state.frame,
                          "expected QRF mapping of field labels"};
    return result;
}

std::array<double, 4> bmv_port_probabilities(const BranchState& state,
                                             const BmvCouplings& couplings) {
    state.validate();
    if (state.branches.size() != 4)
        throw ScenarioError("bmv_port_probabilities: expected a 2x2 branch structure");

    // The two interferometer particles are the gravitating ones; everything
    // else (including the frame) serves as reference.
    std::vector<std::string> interferometers;
    for (const auto& p : state.particles)
        if (p.gravitating) interferometers.push_back(p.label);
    if (interferometers.size() != 2)
        throw ScenarioError("bmv_port_probabilities: expected exactly two "
                            "gravitating particles");

    std::string reference;
    for (const auto& p : state.particles)
        if (!p.gravitating) { reference = p.label; break; }
    if (reference.empty())
        throw ScenarioError("bmv_port_probabilities: no reference particle");

    auto compute = [&](const BranchState& s) {
        // Intrinsic path of particle P relative to the reference particle:
        // invariant under frame changes, so the 2x2 structure is recoverable
        // in any frame.
        auto intrinsic = [&](const Branch& branch, const std::string& label) {
            const bool label_is_frame = label == s.frame;
            const bool ref_is_frame = reference == s.frame;
            if (label_is_frame) return -branch.paths.at(reference);
            if (ref_is_frame) return branch.paths.at(label);
            return branch.paths.at(label) - branch.paths.at(reference);
        };

        std::array<std::vector<Trajectory>, 2> stored;
        std::array<std::vector<int>, 2> ids;
        for (int p = 0; p < 2; ++p) {
            std::vector<Trajectory> paths;
            paths.reserve(4);
            for (const auto& branch : s.branches)
                paths.push_back(intrinsic(branch, interferometers[static_cast<std::size_t>(p)]));
            std::vector<const Trajectory*> ptrs;
            for (const auto& t : paths) ptrs.push_back(&t);
            ids[static_cast<std::size_t>(p)] = cluster_paths(ptrs, kPathTol);
            stored[static_cast<std::size_t>(p)] = std::move(paths);
            int distinct = 1 + *std::max_element(ids[static_cast<std::size_t>(p)].begin(),
                                                 ids[static_cast<std::size_t>(p)].end());
            if (distinct != 2)
                throw ScenarioError("bmv_port_probabilities: particle '" +
                                    interferometers[static_cast<std::size_t>(p)] +
                                    "' does not have exactly two paths");
        }

        // Deterministic path ordering: cluster representative with the lower
        // first-sample coordinate tuple gets index 0.
        for (int p = 0; p < 2; ++p) {
            std::array<Vec3, 2> rep{};
            for (std::size_t b = 0; b < 4; ++b) {
                const int id = ids[static_cast<std::size_t>(p)][b];
                rep[static_cast<std::size_t>(id)] =
                    stored[static_cast<std::size_t>(p)][b].position(
                        stored[static_cast<std::size_t>(p)][b].t_start());
            }
            const bool swap_ids = std::lexicographical_compare(
                &rep[1].x, &rep[1].x + 3, &rep[0].x, &rep[0].x + 3);
            if (swap_ids)
                for (auto& id : ids[static_cast<std::size_t>(p)]) id = 1 - id;
        }

        std::array<std::array<std::complex<double>, 2>, 2> amp{};
        std::array<std::array<bool, 2>, 2> seen{};
        for (std::size_t b = 0; b < 4; ++b) {
            const int i = ids[0][b], j = ids[1][b];
            if (seen[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
                throw ScenarioError("bmv_port_probabilities: duplicate branch cell");
            seen[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
            const auto& branch = s.branches[b];
            amp[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                branch.amplitude *
                std::polar(1.0, branch.phase +
                                    couplings[static_cast<std::size_t>(i)]
                                             [static_cast<std::size_t>(j)]);
        }

        // Balanced recombiner on each interferometer: U = [[1, i], [i, 1]]/sqrt(2).
        const std::complex<double> u00(1.0 / std::sqrt(2.0), 0.0);
        const std::complex<double> u01(0.0, 1.0 / std::sqrt(2.0));
        auto u = [&](int r, int i) { return (r == i) ? u00 : u01; };
        std::array<double, 4> probs{};
        for (int r = 0; r < 2; ++r) {
            for (int ss = 0; ss < 2; ++ss) {
                std::complex<double> out{};
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j)
                        out += u(r, i) * u(ss, j) *
                               amp[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                probs[static_cast<std::size_t>(2 * r + ss)] = std::norm(out);
            }
        }
        return probs;
    };

    const std::array<double, 4> here = compute(state);

    // Same observable from inside one interferometer particle's frame.
    const BranchState moved =
        qrf_transform(state, FrameTransform{state.frame, interferometers[0]});
    const std::array<double, 4> there = compute(moved);
    for (int i = 0; i < 4; ++i)
        if (std::abs(here[static_cast<std::size_t>(i)] - there[static_cast<std::size_t>(i)]) > 1e-12)
            throw ConsistencyError(
                "bmv_port_probabilities: port probabilities differ between frames");
    return here;
}

EquivalenceReport equivalence_principle_scenario(
    const Vec3& accelerometer_position, double baseline, double duration,
    const std::array<SourceModel, 2>& source_branches, int steps,
    const Constants& c) {
    if (!(baseline > 0.0))
        throw ValidationError("equivalence_principle_scenario: baseline must be positive");
    if (!(duration > 0.0))
        throw ValidationError("equivalence_principle_scenario: duration must be positive");
    if (steps < 100)
        throw ValidationError("equivalence_principle_scenario: steps must be >= 100");

    const Vec3 d_offset = kKickAxis * baseline;
    double r_min = std::numeric_limits<double>::infinity();
    double total_mass = 0.0;
    bool any_localized = false;
    for (const auto& src : source_branches) {
        src.validate();
        const double dist = min_singular_distance(src, accelerometer_position);
        if (std::isfinite(dist)) {
            any_localized = true;
            r_min = std::min(r_min, dist);
            total_mass = std::max(total_mass, std::abs(total_charge(src)));
        }
    }
    if (any_localized && baseline / r_min >= 0.1)
        throw ValidationError(
            "equivalence_principle_scenario: baseline too large for the local "
            "approximation (d/r >= 0.1)");

    EquivalenceReport report;
    const double h = duration / steps;
    report.times.resize(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i) report.times[static_cast<std::size_t>(i)] = h * i;

    for (int b = 0; b < 2; ++b) {
        const SourceModel& src = source_branches[static_cast<std::size_t>(b)];
        // Integrate the test particle absolutely and the baseline relatively:
        // the relative equation of motion subtracts the fields at the two
        // instrument ends, so a uniform field drops out identically instead
        // of through a catastrophic cancellation of meter-scale coordinates.
        Vec3 xa = accelerometer_position, va{};
        Vec3 rel = d_offset, rel_v{};
        auto& series = report.ad_distance[static_cast<std::size_t>(b)];
        series.resize(static_cast<std::size_t>(steps) + 1);
        series[0] = rel.norm();
        for (int i = 0; i < steps; ++i) {
            struct State { Vec3 x, v, r, rv; };
            auto deriv = [&](const State& s) {
                const Vec3 ga = field_at(src, s.x, c);
                const Vec3 gd = field_at(src, s.x + s.r, c);
                return State{s.v, ga, s.rv, gd - ga};
            };
            auto add = [](const State& s, const State& k, double f) {
                return State{s.x + k.x * f, s.v + k.v * f, s.r + k.r * f,
                             s.rv + k.rv * f};
            };
            const State s{xa, va, rel, rel_v};
            const State k1 = deriv(s);
            const State k2 = deriv(add(s, k1, 0.5 * h));
            const State k3 = deriv(add(s, k2, 0.5 * h));
            const State k4 = deriv(add(s, k3, h));
            xa += (k1.x + k2.x * 2.0 + k3.x * 2.0 + k4.x) * (h / 6.0);
            va += (k1.v + k2.v * 2.0 + k3.v * 2.0 + k4.v) * (h / 6.0);
            rel += (k1.r + k2.r * 2.0 + k3.r * 2.0 + k4.r) * (h / 6.0);
            rel_v += (k1.rv + k2.rv * 2.0 + k3.rv * 2.0 + k4.rv) * (h / 6.0);
            series[static_cast<std::size_t>(i) + 1] = rel.norm();
        }
        if (std::isfinite(r_min)) {
            const double end_r = min_singular_distance(src, xa);
            r_min = std::min(r_min, end_r);
        }
    }

    report.interbranch_diff.resize(report.times.size());
    for (std::size_t i = 0; i < report.times.size(); ++i) {
        report.interbranch_diff[i] =
            std::abs(report.ad_distance[0][i] - report.ad_distance[1][i]);
        report.max_interbranch_diff =
            std::max(report.max_interbranch_diff, report.interbranch_diff[i]);
    }
    report.tidal_bound =
        any_localized
            ? c.G * total_mass * baseline * duration * duration / (r_min * r_min * r_min)
            : 0.0;
    report.within_bound = any_localized
                              ? report.max_interbranch_diff < report.tidal_bound
                              : report.max_interbranch_diff == 0.0;
    return report;
}

}  // namespace gravphase
