// Command-line entry point: config-driven scenario runs with deterministic
// CSV/JSON artifacts.
//
// Exit codes: 0 success, 2 validation/config, 3 convergence, 4 internal
// consistency.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gravphase/analysis.hpp"
#include "gravphase/config.hpp"
#include "gravphase/errors.hpp"
#include "gravphase/report.hpp"
#include "gravphase/scenario.hpp"

namespace {

using namespace gravphase;

struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    int steps = 0;
    double rel_tol = 0.0;
    std::uint64_t seed = 1;
};

Scenario load_with_overrides(const CommonOptions& opt) {
    Scenario scenario = load_scenario(opt.config_path);
    if (!opt.out_dir.empty()) scenario.out_dir = opt.out_dir;
    if (opt.steps > 0) scenario.sc_steps = opt.steps;
    if (opt.rel_tol > 0.0) scenario.qspec.rel_tol = opt.rel_tol;
    return scenario;
}

int cmd_run(const CommonOptions& opt) {
    const Scenario scenario = load_with_overrides(opt);
    const RunReport report = run_scenario(scenario);
    std::cout << "scenario " << report.scenario_id << " (config "
              << report.config_hash.substr(0, 12) << ")\n";
    for (const auto& row : report.rows)
        std::cout << "  " << row.method << "  P1=" << format_double(row.P1)
                  << "  delta_phi=" << format_double(row.delta_phi)
                  << " rad  (tol " << format_double(row.tol) << ")\n";
    std::cout << "artifacts written to " << scenario.out_dir << " in "
              << format_double(report.wall_time_s) << " s\n";
    return 0;
}

int cmd_sweep(const CommonOptions& opt, const std::string& key,
              const std::vector<double>& values) {
    const ConfigFile config = ConfigFile::parse_file(opt.config_path);
    const std::string out = opt.out_dir.empty() ? "out" : opt.out_dir;
    sweep_scenario(config, key, values, out);
    std::cout << "sweep over " << key << " (" << values.size()
              << " values) written to " << out << "/sweep.csv\n";
    return 0;
}

int cmd_frames(const CommonOptions& opt, int random_count) {
    const std::string out = opt.out_dir.empty() ? "out" : opt.out_dir;
    ensure_directory(out);
    FlatReport flat;
    bool all_pass = true;

    if (random_count > 0) {
        int passes = 0;
        for (int i = 0; i < random_count; ++i) {
            const FramesReport r = frames_check_random(opt.seed + static_cast<std::uint64_t>(i));
            const bool ok = r.phases_equal && r.roundtrip_ok;
            passes += ok ? 1 : 0;
            all_pass = all_pass && ok;
        }
        flat.set("random_scenarios", random_count);
        flat.set("passes", passes);
        flat.set("seed", static_cast<int>(opt.seed));
        flat.set("verdict", all_pass ? "PASS" : "FAIL");
        std::cout << "frames: " << passes << "/" << random_count << " randomized "
                  << "scenarios PASS\n";
    } else {
        const Scenario scenario = load_with_overrides(opt);
        const FramesReport r = frames_check(scenario);
        const BranchState state = scenario_branch_state(scenario);
        dump_branch_state(state, scenario.config_hash, 101, out + "/state_frame_D.csv");
        dump_branch_state(qrf_transform(state, {"D", "A"}), scenario.config_hash, 101,
                          out + "/state_frame_A.csv");
        all_pass = r.phases_equal && r.roundtrip_ok;
        flat.set("config_hash", scenario.config_hash);
        flat.set("phase_frame_D_rad", r.phase_frame_d);
        flat.set("phase_frame_A_rad", r.phase_frame_a);
        flat.set("phases_equal_1e-12", r.phases_equal);
        flat.set("roundtrip_identity", r.roundtrip_ok);
        flat.set("frame_D_partition_AG_B_rank", r.rank_frame_d);
        flat.set("frame_D_partition_AG_B_product", r.product_frame_d);
        flat.set("frame_A_partition_B_D_rank", r.rank_frame_a);
        flat.set("assumption",
                 "point-mass reduction of the source; expected QRF field-label mapping");
        flat.set("verdict", all_pass ? "PASS" : "FAIL");
        std::cout << "frames: phase(D) = " << format_double(r.phase_frame_d)
                  << " rad, phase(A) = " << format_double(r.phase_frame_a)
                  << " rad -> " << (all_pass ? "PASS" : "FAIL") << "\n";
    }
    flat.write_file(out + "/frames.json");
    if (!all_pass) throw ConsistencyError("frames: frame invariance violated");
    return 0;
}

int cmd_fit(const std::string& input_path, const std::string& out_dir, bool student_t) {
    std::ifstream in(input_path);
    if (!in) throw ConfigError("fit: cannot open '" + input_path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string content = buffer.str();

    std::istringstream lines(content);
    std::string line;
    std::vector<PhaseDataPoint> data;
    bool header_seen = false;
    while (std::getline(lines, line)) {
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            if (line.find("p_upper") == std::string::npos)
                throw ConfigError("fit: input must carry a 'p_upper,phase_rad,sigma_rad' header");
            header_seen = true;
            continue;
        }
        std::istringstream cells(line);
        std::string cell;
        PhaseDataPoint point;
        if (!std::getline(cells, cell, ',')) continue;
        point.p_upper = std::stod(cell);
        if (!std::getline(cells, cell, ','))
            throw ConfigError("fit: malformed row '" + line + "'");
        point.phase = std::stod(cell);
        if (!std::getline(cells, cell, ','))
            throw ConfigError("fit: malformed row '" + line + "'");
        point.sigma = std::stod(cell);
        data.push_back(point);
    }

    const FitResult fit = weighted_linear_fit(data, student_t);
    FlatReport flat;
    flat.set("input_hash", git_blob_sha1(content));
    flat.set("n_points", static_cast<int>(data.size()));
    flat.set("slope_rad_per_probability", fit.slope);
    flat.set("slope_sigma", fit.slope_sigma);
    flat.set("intercept_rad", fit.intercept);
    flat.set("p_value", fit.p_value);
    flat.set("chi2_red", fit.chi2_red);
    flat.set("dof", fit.dof);
    flat.set("p_value_model", student_t ? "student_t" : "normal");
    flat.set("note", kFitDisclaimer);
    const std::string out = out_dir.empty() ? "out" : out_dir;
    ensure_directory(out);
    flat.write_file(out + "/fit.json");
    std::cout << "fit: slope = " << format_double(fit.slope) << " +- "
              << format_double(fit.slope_sigma) << ", p = " << format_double(fit.p_value)
              << ", chi2_red = " << format_double(fit.chi2_red) << "\n";
    return 0;
}

int cmd_energy(const CommonOptions& opt) {
    const ConfigFile config = ConfigFile::parse_file(opt.config_path);
    const Constants constants = build_constants(config);
    const SourceModel a = build_source(config, "source_a", constants);
    const SourceModel b = build_source(config, "source_b", constants);
    QuadratureSpec q = build_quadrature(config);
    if (opt.rel_tol > 0.0) q.rel_tol = opt.rel_tol;

    const EnergyResult energy = interaction_energy(a, b, q, constants);
    FlatReport flat;
    flat.set("config_hash", git_blob_sha1(config.raw_text()));
    flat.set("interaction_energy_J", energy.value);
    flat.set("achieved_rel_tol", energy.achieved_rel_tol);
    flat.set("self_energy_removed", energy.self_energy_removed);
    const std::string out = opt.out_dir.empty() ? "out" : opt.out_dir;
    ensure_directory(out);
    flat.write_file(out + "/energy.json");
    std::cout << "interaction energy = " << format_double(energy.value) << " J (tol "
              << format_double(energy.achieved_rel_tol) << ")\n";
    return 0;
}

int cmd_backaction(const CommonOptions& opt, double delta_v) {
    const Scenario scenario = load_with_overrides(opt);
    const BackactionBounds bounds = backaction_bounds(
        scenario.ispec.M, delta_v, scenario.ispec, scenario.source, scenario.constants);
    FlatReport flat;
    flat.set("config_hash", scenario.config_hash);
    flat.set("source_mass_kg", scenario.ispec.M);
    flat.set("delta_v_m_per_s", delta_v);
    flat.set("position_uncertainty_m", bounds.position_uncertainty);
    flat.set("max_source_deflection_m", bounds.max_source_deflection);
    flat.set("deflection_unobservable",
             bounds.max_source_deflection < bounds.position_uncertainty);
    const std::string out = scenario.out_dir;
    ensure_directory(out);
    flat.write_file(out + "/backaction.json");
    std::cout << "position uncertainty " << format_double(bounds.position_uncertainty)
              << " m vs max source deflection "
              << format_double(bounds.max_source_deflection) << " m\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"matter-wave interferometry in nontrivial gravitational fields"};
    app.require_subcommand(1);

    CommonOptions opt;
    std::string sweep_key;
    std::vector<double> sweep_values;
    int random_count = 0;
    std::string fit_input;
    bool student_t = false;
    double delta_v = 1e-3;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* config_opt = cmd->add_option("--config", opt.config_path, "scenario config file");
        if (needs_config) config_opt->required();
        cmd->add_option("--out-dir", opt.out_dir, "output directory");
        cmd->add_option("--steps", opt.steps, "semiclassical integrator steps");
        cmd->add_option("--rel-tol", opt.rel_tol, "energy quadrature tolerance");
        cmd->add_option("--seed", opt.seed, "seed for randomized scenarios");
    };

    auto* run = app.add_subcommand("run", "run the scenario's phase computations");
    add_common(run, true);

    auto* sweep = app.add_subcommand("sweep", "run the scenario per value of one key");
    add_common(sweep, true);
    sweep->add_option("--key", sweep_key, "dotted numeric key, e.g. interferometer.upper_arm_probability")->required();
    sweep->add_option("--values", sweep_values, "values to sweep")->required()->delimiter(',');

    auto* frames = app.add_subcommand("frames", "compare the phase across quantum reference frames");
    add_common(frames, false);
    frames->add_option("--random", random_count, "run N randomized scenarios instead of the config");

    auto* fit = app.add_subcommand("fit", "weighted linear fit of a phase-vs-probability CSV");
    fit->add_option("--input", fit_input, "CSV with p_upper,phase_rad,sigma_rad")->required();
    fit->add_option("--out-dir", opt.out_dir, "output directory");
    fit->add_flag("--t-dist", student_t, "Student-t p-value for small samples");

    auto* energy = app.add_subcommand("energy", "two-source field-energy check");
    add_common(energy, true);

    auto* backaction = app.add_subcommand("backaction", "source back-action bounds");
    add_common(backaction, true);
    backaction->add_option("--delta-v", delta_v, "source velocity uncertainty, m/s");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(opt);
        if (sweep->parsed()) return cmd_sweep(opt, sweep_key, sweep_values);
        if (frames->parsed()) {
            if (random_count == 0 && opt.config_path.empty())
                throw ConfigError("frames: provide --config or --random N");
            return cmd_frames(opt, random_count);
        }
        if (fit->parsed()) return cmd_fit(fit_input, opt.out_dir, student_t);
        if (energy->parsed()) return cmd_energy(opt);
        if (backaction->parsed()) return cmd_backaction(opt, delta_v);
    } catch (const Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return static_cast<int>(err.code());
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
    return 0;
}
