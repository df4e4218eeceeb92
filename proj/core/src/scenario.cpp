#include "gravphase/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "gravphase/errors.hpp"
#include "gravphase/report.hpp"

namespace gravphase {

namespace {

constexpr double kPi = 3.14159265358979323846;

const std::map<std::string, std::vector<std::string>>& scenario_schema() {
    static const std::map<std::string, std::vector<std::string>> schema = {
        {"constants",
         {"G_m3_per_kg_s2", "hbar_J_s", "eps0_F_per_m", "rb87_mass_kg",
          "laser_wavelength_m"}},
        {"interferometer",
         {"test_mass_kg", "detector_mass_kg", "splitting_hbar_k", "wave_vector_per_m",
          "separation_target_m", "pulse_separation_s", "launch_position_m",
          "upper_arm_probability", "gradiometer_baseline_m"}},
        {"source",
         {"type", "mass_kg", "charge_C", "ring_radius_m", "center_m", "normal",
          "arc_span_rad", "arc_phase_rad", "g_vector_m_per_s2", "coupling",
          "coupling_constant"}},
        {"source_a",
         {"type", "mass_kg", "charge_C", "ring_radius_m", "center_m", "normal",
          "arc_span_rad", "arc_phase_rad", "g_vector_m_per_s2", "coupling",
          "coupling_constant"}},
        {"source_b",
         {"type", "mass_kg", "charge_C", "ring_radius_m", "center_m", "normal",
          "arc_span_rad", "arc_phase_rad", "g_vector_m_per_s2", "coupling",
          "coupling_constant"}},
        {"source_trajectory", {"apex_position_m", "acceleration_m_per_s2"}},
        {"quadrature",
         {"time_samples", "domain_radius_m", "radial_cells", "angular_cells",
          "exclusion_radius_m", "energy_rel_tol"}},
        {"semiclassical",
         {"steps", "include_lower_interferometer", "probabilities",
          "min_source_distance_m"}},
        {"output", {"dir", "fringe_points", "emit_trajectories", "methods"}},
    };
    return schema;
}

PhaseMethod parse_method(const std::string& name) {
    if (name == "potential_integral") return PhaseMethod::potential_integral;
    if (name == "field_energy") return PhaseMethod::field_energy;
    if (name == "semiclassical") return PhaseMethod::semiclassical;
    throw ConfigError("config: unknown method '" + name + "'");
}

}  // namespace

Constants build_constants(const ConfigFile& config) {
    Constants c;
    c.G = config.get_double_or("constants", "G_m3_per_kg_s2", c.G);
    c.hbar = config.get_double_or("constants", "hbar_J_s", c.hbar);
    c.eps0 = config.get_double_or("constants", "eps0_F_per_m", c.eps0);
    c.m_rb87 = config.get_double_or("constants", "rb87_mass_kg", c.m_rb87);
    c.lambda_laser =
        config.get_double_or("constants", "laser_wavelength_m", c.lambda_laser);
    c.validate();
    return c;
}

SourceModel build_source(const ConfigFile& config, const std::string& section,
                         const Constants& c) {
    (void)c;
    const std::string type = config.get_string(section, "type");
    Coupling coupling;
    const std::string coupling_name =
        config.get_string_or(section, "coupling", "gravity");
    if (coupling_name == "gravity") coupling.kind = Coupling::Kind::gravity;
    else if (coupling_name == "em") coupling.kind = Coupling::Kind::em;
    else if (coupling_name == "custom") {
        coupling.kind = Coupling::Kind::custom;
        coupling.custom_constant = config.get_double(section, "coupling_constant");
    } else {
        throw ConfigError("config: unknown coupling '" + coupling_name + "'");
    }

    auto charge = [&]() {
        if (coupling.kind == Coupling::Kind::gravity)
            return config.get_double(section, "mass_kg");
        if (config.has(section, "charge_C")) return config.get_double(section, "charge_C");
        return config.get_double(section, "mass_kg");
    };

    if (type == "point_mass") {
        return SourceModel::point(charge(),
                                  config.get_vec3_or(section, "center_m", Vec3{}),
                                  coupling);
    }
    if (type == "ring_arc") {
        RingArc ring;
        ring.mass = charge();
        ring.radius = config.get_double(section, "ring_radius_m");
        ring.center = config.get_vec3_or(section, "center_m", Vec3{});
        ring.normal = config.get_vec3_or(section, "normal", Vec3{0.0, 0.0, 1.0});
        ring.arc_span = config.get_double_or(section, "arc_span_rad", 2.0 * kPi);
        ring.arc_phase = config.get_double_or(section, "arc_phase_rad", 0.0);
        return SourceModel::ring(ring, coupling);
    }
    if (type == "uniform_field") {
        return SourceModel::uniform(config.get_vec3(section, "g_vector_m_per_s2"));
    }
    throw ConfigError("config: unknown source type '" + type + "'");
}

QuadratureSpec build_quadrature(const ConfigFile& config) {
    QuadratureSpec q;
    q.domain_radius = config.get_double_or("quadrature", "domain_radius_m", 0.0);
    q.radial_cells = config.get_int_or("quadrature", "radial_cells", 8);
    q.angular_cells = config.get_int_or("quadrature", "angular_cells", 8);
    q.exclusion_radius = config.get_double_or("quadrature", "exclusion_radius_m", 0.0);
    q.rel_tol = config.get_double_or("quadrature", "energy_rel_tol", 1e-7);
    q.validate();
    return q;
}

Scenario build_scenario(const ConfigFile& config) {
    config.enforce_schema(scenario_schema());

    Scenario s;
    s.id = config.name();
    s.config_hash = git_blob_sha1(config.raw_text());
    s.constants = build_constants(config);

    InterferometerSpec& spec = s.ispec;
    spec.m = config.get_double_or("interferometer", "test_mass_kg", s.constants.m_rb87);
    spec.M_detector = config.get_double_or("interferometer", "detector_mass_kg", 1.0);

    const bool has_split = config.has("interferometer", "splitting_hbar_k");
    const bool has_k = config.has("interferometer", "wave_vector_per_m");
    if (has_split == has_k)
        throw ConfigError("config: provide exactly one of splitting_hbar_k / "
                          "wave_vector_per_m");
    spec.k = has_k ? config.get_double("interferometer", "wave_vector_per_m")
                   : config.get_double("interferometer", "splitting_hbar_k") * kPi /
                         s.constants.lambda_laser;

    const bool has_sep = config.has("interferometer", "separation_target_m");
    const bool has_T = config.has("interferometer", "pulse_separation_s");
    if (has_sep == has_T)
        throw ConfigError("config: provide exactly one of separation_target_m / "
                          "pulse_separation_s");
    spec.T = has_T ? config.get_double("interferometer", "pulse_separation_s")
                   : InterferometerSpec::pulse_time_for_separation(
                         config.get_double("interferometer", "separation_target_m"),
                         spec.m, spec.k, s.constants);

    spec.x0 = config.get_vec3_or("interferometer", "launch_position_m", Vec3{});
    spec.P1 = config.get_double_or("interferometer", "upper_arm_probability", 0.5);

    s.source = build_source(config, "source", s.constants);
    spec.M = std::abs(total_charge(s.source));
    // A uniform field carries no source charge; the stored source mass is
    // inert then (phase routes read the source model, never this field).
    if (spec.M == 0.0) spec.M = 1.0;

    spec.xs0 = config.get_vec3("source_trajectory", "apex_position_m");
    spec.a_src = config.get_vec3("source_trajectory", "acceleration_m_per_s2");
    spec.validate();

    s.qspec = build_quadrature(config);
    s.time_samples = config.get_int_or("quadrature", "time_samples", 2001);
    if (s.time_samples < 3 || s.time_samples % 2 == 0)
        throw ConfigError("config: time_samples must be odd and >= 3");

    s.sc_steps = config.get_int_or("semiclassical", "steps", 20000);
    s.min_source_distance =
        config.get_double_or("semiclassical", "min_source_distance_m", 1e-3);
    s.include_lower =
        config.get_bool_or("semiclassical", "include_lower_interferometer", false);
    if (s.include_lower)
        s.baseline = config.get_double("interferometer", "gradiometer_baseline_m");

    if (config.has("semiclassical", "probabilities"))
        s.probabilities = config.get_doubles("semiclassical", "probabilities");
    else
        s.probabilities = {spec.P1};
    for (double p : s.probabilities)
        if (!(p >= 0.0 && p <= 1.0))
            throw ConfigError("config: probabilities must lie in [0, 1]");

    if (config.has("output", "methods")) {
        s.methods.clear();
        for (const auto& name : config.get_strings("output", "methods"))
            s.methods.push_back(parse_method(name));
    }
    s.fringe_points = config.get_int_or("output", "fringe_points", 64);
    s.emit_trajectories = config.get_bool_or("output", "emit_trajectories", false);
    s.out_dir = config.get_string_or("output", "dir", "out");
    return s;
}

Scenario load_scenario(const std::string& path) {
    return build_scenario(ConfigFile::parse_file(path));
}

namespace {

// Shifts the whole interferometer down the kick axis (the gradiometer's lower
// interferometer shares pulses and P1 with the upper one).
InterferometerSpec lowered(const InterferometerSpec& spec, double baseline) {
    InterferometerSpec low = spec;
    low.x0 -= kKickAxis * baseline;
    return low;
}

struct PhasePair {
    PhaseResult upper;
    std::optional<PhaseResult> lower;
    double combined() const {
        return lower ? upper.delta_phi - lower->delta_phi : upper.delta_phi;
    }
    double tol() const {
        return lower ? upper.quadrature_tol + lower->quadrature_tol
                     : upper.quadrature_tol;
    }
};

PhasePair quantum_phase(const Scenario& s, PhaseMethod method) {
    const auto c = s.constants;
    const TimeGrid grid = s.grid();
    auto compute = [&](const InterferometerSpec& spec) {
        const auto [x1, x2] = mach_zehnder_arms(spec, c);
        const Trajectory xs = parabolic_source(spec);
        if (method == PhaseMethod::potential_integral)
            return phase_potential_integral(x1, x2, xs, s.source, spec.m, grid, c);
        return phase_from_field_energy(x1, x2, xs, s.source, spec.m, grid, s.qspec, c);
    };
    PhasePair pair{compute(s.ispec), std::nullopt};
    if (s.include_lower) pair.lower = compute(lowered(s.ispec, s.baseline));
    return pair;
}

PhasePair semiclassical_phase(const Scenario& s, double P1) {
    const auto c = s.constants;
    auto compute = [&](InterferometerSpec spec) {
        spec.P1 = P1;
        const SemiclassicalEvolution evo = semiclassical_evolve(
            spec, s.source, s.sc_steps, c, s.min_source_distance);
        return phase_semiclassical(evo, spec, s.source, c);
    };
    PhasePair pair{compute(s.ispec), std::nullopt};
    if (s.include_lower) pair.lower = compute(lowered(s.ispec, s.baseline));
    return pair;
}

}  // namespace

RunReport run_scenario(const Scenario& scenario) {
    const auto t_begin = std::chrono::steady_clock::now();
    const Constants& c = scenario.constants;

    RunReport report;
    report.scenario_id = scenario.id;
    report.config_hash = scenario.config_hash;
    if (scenario.include_lower)
        report.assumptions.push_back(
            "gradiometer difference: phase = upper - lower, baseline " +
            format_double(scenario.baseline) + " m");
    report.assumptions.push_back(
        "pulse time T = " + format_double(scenario.ispec.T) +
        " s from the wave-packet-separation convention 2 hbar k T / m");

    CsvWriter phase_csv(scenario.config_hash,
                        {"scenario_id", "method", "P1", "delta_phi_rad", "tol"});

    ensure_directory(scenario.out_dir);

    std::optional<double> quantum_dphi;
    for (const PhaseMethod method : scenario.methods) {
        if (method == PhaseMethod::semiclassical) {
            for (double P1 : scenario.probabilities) {
                const PhasePair pair = semiclassical_phase(scenario, P1);
                report.rows.push_back({phase_method_name(method), P1, pair.combined(),
                                       pair.tol()});
                if (scenario.include_lower)
                    report.rows_upper_only.push_back({phase_method_name(method), P1,
                                                      pair.upper.delta_phi,
                                                      pair.upper.quadrature_tol});
            }
        } else {
            // The quantum phase carries no dependence on the probability
            // split; one evaluation serves every P1 row.
            const PhasePair pair = quantum_phase(scenario, method);
            if (method == PhaseMethod::potential_integral)
                quantum_dphi = pair.combined();
            for (double P1 : scenario.probabilities) {
                report.rows.push_back({phase_method_name(method), P1, pair.combined(),
                                       pair.tol()});
                if (scenario.include_lower)
                    report.rows_upper_only.push_back({phase_method_name(method), P1,
                                                      pair.upper.delta_phi,
                                                      pair.upper.quadrature_tol});
            }
        }
    }

    for (const auto& row : report.rows)
        phase_csv.add_row({scenario.id, row.method, format_double(row.P1),
                           format_double(row.delta_phi), format_double(row.tol)});
    phase_csv.write_file(scenario.out_dir + "/phase.csv");

    FlatReport flat;
    flat.set("scenario_id", scenario.id);
    flat.set("config_hash", scenario.config_hash);
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const auto& row = report.rows[i];
        const std::string prefix = "row" + std::to_string(i) + ".";
        flat.set(prefix + "method", row.method);
        flat.set(prefix + "P1", row.P1);
        flat.set(prefix + "delta_phi_rad", row.delta_phi);
        flat.set(prefix + "tol", row.tol);
    }
    for (std::size_t i = 0; i < report.rows_upper_only.size(); ++i) {
        const auto& row = report.rows_upper_only[i];
        const std::string prefix = "upper_only_row" + std::to_string(i) + ".";
        flat.set(prefix + "method", row.method);
        flat.set(prefix + "P1", row.P1);
        flat.set(prefix + "delta_phi_rad", row.delta_phi);
        flat.set(prefix + "tol", row.tol);
    }
    for (std::size_t i = 0; i < report.assumptions.size(); ++i)
        flat.set("assumption" + std::to_string(i), report.assumptions[i]);

    // Detection-fringe artifacts: the reference-phase sweep recovers the same
    // quantum phase at every probability split, while the literal port-ratio
    // angle folds the reduced contrast in.
    if (quantum_dphi) {
        for (double P1 : scenario.probabilities) {
            const auto [A1, A2] = beamsplitter_amplitudes(P1);
            const auto scan =
                fringe_scan(*quantum_dphi, A1, A2, scenario.fringe_points);
            CsvWriter fringe_csv(scenario.config_hash, {"ref_phase", "p_d1"});
            for (const auto& pt : scan)
                fringe_csv.add_row({format_double(pt.ref_phase), format_double(pt.p_d1)});
            fringe_csv.write_file(scenario.out_dir + "/fringe_P1_" + format_double(P1) +
                                  ".csv");
            const std::string prefix = "fringe_P1_" + format_double(P1) + ".";
            const double recovered = fringe_fit_phase(scan);
            flat.set(prefix + "fit_delta_phi_rad", recovered);
            flat.set(prefix + "port_ratio_phase_rad",
                     port_ratio_phase(ports_from_phase(*quantum_dphi, A1, A2, 0.0, 0.0)));
        }
    }

    if (scenario.emit_trajectories &&
        std::find(scenario.methods.begin(), scenario.methods.end(),
                  PhaseMethod::semiclassical) != scenario.methods.end()) {
        InterferometerSpec spec = scenario.ispec;
        spec.P1 = scenario.probabilities.front();
        const SemiclassicalEvolution evo = semiclassical_evolve(
            spec, scenario.source, scenario.sc_steps, c, scenario.min_source_distance);
        const Trajectory xs = parabolic_source(spec);
        CsvWriter traj_csv(scenario.config_hash,
                           {"t_s", "x1_x", "x1_y", "x1_z", "x2_x", "x2_y", "x2_z",
                            "xcm_x", "xcm_y", "xcm_z", "xs_x", "xs_y", "xs_z"});
        for (int i = 0; i <= evo.step_count; ++i) {
            const double t = evo.dt * i;
            const Vec3 p1 = evo.pos1[static_cast<std::size_t>(i)];
            const Vec3 p2 = evo.pos2[static_cast<std::size_t>(i)];
            const Vec3 cm = p1 * spec.P1 + p2 * (1.0 - spec.P1);
            const Vec3 ps = xs.position(t);
            traj_csv.add_row({format_double(t), format_double(p1.x), format_double(p1.y),
                              format_double(p1.z), format_double(p2.x),
                              format_double(p2.y), format_double(p2.z),
                              format_double(cm.x), format_double(cm.y),
                              format_double(cm.z), format_double(ps.x),
                              format_double(ps.y), format_double(ps.z)});
        }
        traj_csv.write_file(scenario.out_dir + "/trajectories.csv");
    }

    flat.write_file(scenario.out_dir + "/report.json");

    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin)
            .count();
    return report;
}

void sweep_scenario(const ConfigFile& base_config, const std::string& dotted_key,
                    const std::vector<double>& values, const std::string& out_dir) {
    if (values.empty()) throw ValidationError("sweep: no values given");
    const std::string base_hash = git_blob_sha1(base_config.raw_text());
    CsvWriter csv(base_hash, {"sweep_key", "sweep_value", "scenario_id", "method", "P1",
                              "delta_phi_rad", "tol"});
    for (double value : values) {
        ConfigFile config = base_config;
        config.override_value(dotted_key, value);
        Scenario scenario = build_scenario(config);
        scenario.out_dir = out_dir + "/sweep_" + format_double(value);
        const RunReport report = run_scenario(scenario);
        for (const auto& row : report.rows)
            csv.add_row({dotted_key, format_double(value), report.scenario_id,
                         row.method, format_double(row.P1),
                         format_double(row.delta_phi), format_double(row.tol)});
    }
    ensure_directory(out_dir);
    csv.write_file(out_dir + "/sweep.csv");
}

namespace {

BranchState two_branch_state(const InterferometerSpec& spec, const Constants& c) {
    const auto [x1, x2] = mach_zehnder_arms(spec, c);
    const Trajectory xs = parabolic_source(spec);
    BranchState state;
    state.frame = "D";
    state.particles = {{"A", spec.m, true}, {"B", spec.M, true},
                       {"D", spec.M_detector, false}};
    const double amp = 1.0 / std::sqrt(2.0);
    Branch b1;
    b1.amplitude = {amp, 0.0};
    b1.paths.emplace("A", x1);
    b1.paths.emplace("B", xs);
    Branch b2;
    b2.amplitude = {amp, 0.0};
    b2.paths.emplace("A", x2);
    b2.paths.emplace("B", xs);
    state.branches = {std::move(b1), std::move(b2)};
    state.validate();
    return state;
}

FramesReport frames_check_state(const BranchState& state, double m, double M,
                                const TimeGrid& grid, const Constants& c) {
    FramesReport out;
    const PhaseResult in_d = phase_in_frame(state, m, M, grid, c);
    const BranchState in_frame_a = qrf_transform(state, {"D", "A"});
    const PhaseResult in_a = phase_in_frame(in_frame_a, m, M, grid, c);
    out.phase_frame_d = in_d.delta_phi;
    out.phase_frame_a = in_a.delta_phi;
    const double scale =
        std::max({std::abs(in_d.delta_phi), std::abs(in_a.delta_phi), 1e-300});
    out.phases_equal = std::abs(in_d.delta_phi - in_a.delta_phi) <= 1e-12 * scale;

    const EntanglementReport ent_d = entanglement_partition(state, {"A", "G"});
    out.rank_frame_d = ent_d.schmidt_rank;
    out.product_frame_d = ent_d.is_product;
    const EntanglementReport ent_a = entanglement_partition(in_frame_a, {"B"});
    out.rank_frame_a = ent_a.schmidt_rank;

    const BranchState back = qrf_transform(in_frame_a, {"A", "D"});
    out.roundtrip_ok = true;
    for (std::size_t b = 0; b < state.branches.size(); ++b)
        for (const auto& [label, path] : state.branches[b].paths)
            if (max_distance(path, back.branches[b].paths.at(label)) > 1e-12)
                out.roundtrip_ok = false;
    return out;
}

}  // namespace

FramesReport frames_check(const Scenario& scenario) {
    // Point-mass reduction of the configured source, riding the parabola.
    const InterferometerSpec& spec = scenario.ispec;
    const BranchState state = two_branch_state(spec, scenario.constants);
    return frames_check_state(state, spec.m, spec.M, scenario.grid(),
                              scenario.constants);
}

BranchState scenario_branch_state(const Scenario& scenario) {
    return two_branch_state(scenario.ispec, scenario.constants);
}

void dump_branch_state(const BranchState& state, const std::string& config_hash,
                       int samples, const std::string& path) {
    if (samples < 2) throw ValidationError("dump_branch_state: samples must be >= 2");
    CsvWriter csv(config_hash, {"branch_id", "amplitude_re", "amplitude_im", "phase",
                                "particle", "t", "x", "y", "z"});
    for (std::size_t b = 0; b < state.branches.size(); ++b) {
        const Branch& branch = state.branches[b];
        for (const auto& [label, path_traj] : branch.paths) {
            const double t0 = path_traj.t_start(), t1 = path_traj.t_end();
            for (int i = 0; i < samples; ++i) {
                const double t = t0 + (t1 - t0) * i / static_cast<double>(samples - 1);
                const Vec3 x = path_traj.position(t);
                csv.add_row({std::to_string(b), format_double(branch.amplitude.real()),
                             format_double(branch.amplitude.imag()),
                             format_double(branch.phase), label, format_double(t),
                             format_double(x.x), format_double(x.y),
                             format_double(x.z)});
            }
        }
    }
    csv.write_file(path);
}

FramesReport frames_check_random(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    Constants c;

    InterferometerSpec spec;
    spec.m = c.m_rb87 * (0.5 + uniform(rng));
    spec.M = 0.5 + 2.0 * uniform(rng);
    spec.M_detector = 1.0;
    spec.k = (0.5 + uniform(rng)) * 2.0e8;
    spec.T = 0.3 + 0.7 * uniform(rng);
    spec.x0 = Vec3{0.0, 0.0, 0.2 * (uniform(rng) - 0.5)};
    const double standoff = 0.3 + 0.7 * uniform(rng);
    spec.xs0 = Vec3{0.2 * (uniform(rng) - 0.5), 0.2 * (uniform(rng) - 0.5),
                    spec.x0.z + standoff};
    spec.a_src = Vec3{0.0, 0.0, 2.0 * uniform(rng)};
    spec.P1 = 0.5;
    spec.validate();

    const TimeGrid grid(0.0, 2.0 * spec.T, 801);
    const BranchState state = two_branch_state(spec, c);
    return frames_check_state(state, spec.m, spec.M, grid, c);
}

}  // namespace gravphase
