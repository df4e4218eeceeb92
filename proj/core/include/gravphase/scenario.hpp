#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gravphase/analysis.hpp"
#include "gravphase/config.hpp"
#include "gravphase/constants.hpp"
#include "gravphase/kinematics.hpp"
#include "gravphase/phase.hpp"
#include "gravphase/qrf.hpp"
#include "gravphase/sources.hpp"
#include "gravphase/time_grid.hpp"

namespace gravphase {

// A fully validated scenario, built from a config file. The source geometry
// is expressed relative to the source trajectory point (the whole model rides
// the parabola rigidly).
struct Scenario {
    std::string id;
    std::string config_hash;
    Constants constants;
    InterferometerSpec ispec;
    SourceModel source;
    QuadratureSpec qspec;
    int time_samples = 2001;
    int sc_steps = 20000;
    double min_source_distance = 1e-3;
    bool include_lower = false;
    double baseline = 0.0;
    std::vector<double> probabilities{0.5};
    std::vector<PhaseMethod> methods{PhaseMethod::potential_integral};
    int fringe_points = 64;
    bool emit_trajectories = false;
    std::string out_dir = "out";

    TimeGrid grid() const { return TimeGrid(0.0, 2.0 * ispec.T, time_samples); }
};

Scenario build_scenario(const ConfigFile& config);
Scenario load_scenario(const std::string& path);

// Parses only the [source_x] + [quadrature] sections (energy command).
SourceModel build_source(const ConfigFile& config, const std::string& section,
                         const Constants& c);
QuadratureSpec build_quadrature(const ConfigFile& config);
Constants build_constants(const ConfigFile& config);

struct MethodRow {
    std::string method;
    double P1 = 0.0;
    double delta_phi = 0.0;
    double tol = 0.0;
};

struct RunReport {
    std::string scenario_id;
    std::string config_hash;
    std::vector<MethodRow> rows;             // what the phase CSV holds
    std::vector<MethodRow> rows_upper_only;  // populated when the gradiometer
                                             // difference is enabled
    std::vector<std::string> assumptions;
    double wall_time_s = 0.0;  // console diagnostic, never written to files
};

// Executes the requested methods and writes the deterministic artifacts
// (phase CSV, fringe CSVs, optional trajectory CSV, flat JSON report) under
// out_dir.
RunReport run_scenario(const Scenario& scenario);

// One run per value of the dotted numeric key; a single CSV with the swept
// value prepended, deterministic ordering.
void sweep_scenario(const ConfigFile& base_config, const std::string& dotted_key,
                    const std::vector<double>& values, const std::string& out_dir);

struct FramesReport {
    double phase_frame_d = 0.0;
    double phase_frame_a = 0.0;
    bool phases_equal = false;
    int rank_frame_d = 0;   // (A,G) | B partition in the detector frame
    bool product_frame_d = false;
    int rank_frame_a = 0;   // B | D partition in the test-particle frame
    bool roundtrip_ok = false;
};

// Builds the two-branch state of the scenario (point-mass reduction of the
// source), computes the interaction phase in the detector frame and in the
// test particle's frame, and checks entanglement structure plus the
// round-trip identity.
FramesReport frames_check(const Scenario& scenario);

// Randomized frames scenario for property-style CLI runs.
FramesReport frames_check_random(std::uint64_t seed);

// The scenario's Mach-Zehnder superposition as a branch state in the
// detector frame.
BranchState scenario_branch_state(const Scenario& scenario);

// State dump: per-branch rows
// (branch_id, amplitude_re, amplitude_im, phase, particle, t, x, y, z).
void dump_branch_state(const BranchState& state, const std::string& config_hash,
                       int samples, const std::string& path);

}  // namespace gravphase
