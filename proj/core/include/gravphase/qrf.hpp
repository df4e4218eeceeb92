#pragma once

#include <array>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include "gravphase/constants.hpp"
#include "gravphase/phase.hpp"
#include "gravphase/sources.hpp"
#include "gravphase/time_grid.hpp"
#include "gravphase/trajectory.hpp"

namespace gravphase {

// Branch-path equality tolerance for configuration matching and field-label
// comparison.
inline constexpr double kPathTol = 1e-12;  // m

struct ParticleInfo {
    std::string label;
    double mass = 0.0;
    bool gravitating = false;  // whether it sources the field label
};

struct Branch {
    std::complex<double> amplitude{0.0, 0.0};
    double phase = 0.0;  // accumulated dynamical phase, rad
    std::map<std::string, Trajectory> paths;  // frame particle never appears
};

// A superposition as a finite list of branches over classical paths, with the
// coordinate origin pinned to the frame particle.
struct BranchState {
    std::string frame;
    std::vector<ParticleInfo> particles;  // includes the frame particle
    std::vector<Branch> branches;

    void validate() const;
    const ParticleInfo& particle(const std::string& label) const;
    bool has_particle(const std::string& label) const;
};

struct FrameTransform {
    std::string from_frame;
    std::string to_frame;
};

// Per branch, every remaining particle's path becomes (path - new frame
// particle's path); the old frame particle enters with the negated path of
// the new frame particle. Amplitudes and phases are carried unchanged; the
// field label is a pure function of the paths and needs no separate update.
BranchState qrf_transform(const BranchState& state, const FrameTransform& xf);

// Field label of one branch: the (mass, relative path) list of all
// gravitating particles in the current frame, canonically ordered. Two
// branches carry the same field state iff their labels match within kPathTol.
struct FieldLabel {
    std::vector<std::pair<double, Trajectory>> sources;
};

FieldLabel field_label(const BranchState& state, const Branch& branch);
bool field_labels_equal(const FieldLabel& a, const FieldLabel& b,
                        double tol = kPathTol);

struct EntanglementReport {
    std::vector<std::string> left;
    std::vector<std::string> right;
    int schmidt_rank = 0;
    bool is_product = false;
};

// Rank of the amplitude matrix over distinct left/right configurations
// (compared by path equality within kPathTol). The non-frame particles are
// the subsystems; listing the pseudo-label "G" on the left attaches the field
// label to that side, otherwise the field is traced over.
EntanglementReport entanglement_partition(const BranchState& state,
                                          const std::vector<std::string>& left);

// Interaction phase between the two named particles evaluated from relative
// coordinates only, as available in the state's frame. Expects exactly two
// branches.
PhaseResult phase_in_frame(const BranchState& state, double m, double M,
                           const TimeGrid& grid, const Constants& c,
                           const std::string& test_label = "A",
                           const std::string& source_label = "B");

// Per-branch interaction phases for the 2x2 (two particles x two paths)
// structure: couplings[i][j] applies to the branch pairing path i of the
// first particle with path j of the second.
using BmvCouplings = std::array<std::array<double, 2>, 2>;

// Closes both interferometers with balanced recombiners and returns the four
// joint port probabilities. The same computation is repeated after a
// transform into the first particle's frame; disagreement beyond 1e-12 raises
// ConsistencyError.
std::array<double, 4> bmv_port_probabilities(const BranchState& state,
                                             const BmvCouplings& couplings);

struct EquivalenceReport {
    std::vector<double> times;
    std::array<std::vector<double>, 2> ad_distance;  // per source branch
    std::vector<double> interbranch_diff;
    double max_interbranch_diff = 0.0;
    double tidal_bound = 0.0;    // G M d tau^2 / r_min^3
    bool within_bound = false;
};

// Accelerometer (test particle A and reference D, baseline d) evolved
// classically on each branch of a two-branch source. The A-D distance series
// per branch and their difference quantify what a local instrument could
// resolve.
EquivalenceReport equivalence_principle_scenario(
    const Vec3& accelerometer_position, double baseline, double duration,
    const std::array<SourceModel, 2>& source_branches, int steps,
    const Constants& c);

}  // namespace gravphase
