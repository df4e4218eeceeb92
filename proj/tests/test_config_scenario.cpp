#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gravphase/config.hpp"
#include "gravphase/errors.hpp"
#include "gravphase/report.hpp"
#include "gravphase/scenario.hpp"

using namespace gravphase;

namespace {

std::string minimal_config(const std::string& extra_interferometer = "",
                           const std::string& methods = "potential_integral") {
    std::ostringstream out;
    out << "[interferometer]\n"
        << "splitting_hbar_k = 52\n"
        << "separation_target_m = 0.25\n"
        << extra_interferometer
        << "[source]\n"
        << "type = point_mass\n"
        << "mass_kg = 1.25\n"
        << "[source_trajectory]\n"
        << "apex_position_m = 0 0 0.4\n"
        << "acceleration_m_per_s2 = 0 0 9.80665\n"
        << "[quadrature]\n"
        << "time_samples = 401\n"
        << "[output]\n"
        << "methods = " << methods << "\n";
    return out.str();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

TEST_CASE("bare keys without a unit suffix are rejected by name") {
    const std::string text = "[interferometer]\nT = 1\n";
    const ConfigFile config = ConfigFile::parse_string(text, "bad");
    try {
        build_scenario(config);
        FAIL("expected ConfigError");
    } catch (const ConfigError& err) {
        CHECK(std::string(err.what()).find("'T'") != std::string::npos);
    }
}

TEST_CASE("unknown sections are rejected") {
    const ConfigFile config = ConfigFile::parse_string("[mystery]\nx_m = 1\n", "bad");
    CHECK_THROWS_AS(build_scenario(config), ConfigError);
}

TEST_CASE("duplicate keys are parse errors") {
    CHECK_THROWS_AS(
        ConfigFile::parse_string("[a]\nx_m = 1\nx_m = 2\n", "dup"), ConfigError);
}

TEST_CASE("exactly one wave-vector specification is required") {
    std::string text = minimal_config("wave_vector_per_m = 2e8\n");
    CHECK_THROWS_AS(build_scenario(ConfigFile::parse_string(text, "both")),
                    ConfigError);
}

TEST_CASE("minimal scenario builds with derived pulse time") {
    const Scenario s =
        build_scenario(ConfigFile::parse_string(minimal_config(), "minimal"));
    CHECK(s.ispec.T == doctest::Approx(0.817004).epsilon(1e-5));
    CHECK(s.ispec.M == doctest::Approx(1.25));
    CHECK(s.probabilities.size() == 1);
}

TEST_CASE("scenario runs are byte-deterministic") {
    const std::string dir1 = "test_out/det1";
    const std::string dir2 = "test_out/det2";
    Scenario s = build_scenario(ConfigFile::parse_string(minimal_config(), "det"));
    s.out_dir = dir1;
    run_scenario(s);
    s.out_dir = dir2;
    run_scenario(s);
    CHECK(slurp(dir1 + "/phase.csv") == slurp(dir2 + "/phase.csv"));
    CHECK(slurp(dir1 + "/report.json") == slurp(dir2 + "/report.json"));
    CHECK(!slurp(dir1 + "/phase.csv").empty());
    std::filesystem::remove_all("test_out");
}

TEST_CASE("the config hash heads every csv") {
    Scenario s = build_scenario(ConfigFile::parse_string(minimal_config(), "hash"));
    s.out_dir = "test_out/hash";
    run_scenario(s);
    const std::string csv = slurp(s.out_dir + "/phase.csv");
    CHECK(csv.rfind("# config_hash=" + s.config_hash, 0) == 0);
    std::filesystem::remove_all("test_out");
}

TEST_CASE("git-style blob hash matches a known vector") {
    // sha1("blob 12\0hello world\n") is git's well-known hash of that file.
    CHECK(git_blob_sha1("hello world\n") ==
          "3b18e512dba79e4c8300dd08aeb37f8e728b8dad");
}

TEST_CASE("double formatting round-trips at 17 digits") {
    for (double v : {0.1, -0.26267401682448677, 1e-300, 4.218e-32}) {
        const std::string text = format_double(v);
        CHECK(std::stod(text) == v);
    }
}

TEST_CASE("quantum sweep over the probability yields a constant column") {
    const ConfigFile config = ConfigFile::parse_string(
        minimal_config("upper_arm_probability = 0.5\n"), "sweepq");
    sweep_scenario(config, "interferometer.upper_arm_probability",
                   {0.25, 0.5, 0.75}, "test_out/sweep");
    const std::string csv = slurp("test_out/sweep/sweep.csv");
    // All three rows carry the identical delta_phi.
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);  // hash
    std::getline(lines, line);  // header
    std::string first_value;
    int rows = 0;
    while (std::getline(lines, line)) {
        const auto pos = line.rfind(',');
        const auto pos2 = line.rfind(',', pos - 1);
        const std::string value = line.substr(pos2 + 1, pos - pos2 - 1);
        if (first_value.empty()) first_value = value;
        CHECK(value == first_value);
        ++rows;
    }
    CHECK(rows == 3);
    std::filesystem::remove_all("test_out");
}

TEST_CASE("sweeping an absent key is rejected") {
    const ConfigFile config = ConfigFile::parse_string(minimal_config(), "badsweep");
    CHECK_THROWS_AS(
        sweep_scenario(config, "interferometer.mystery_key", {1.0}, "test_out/x"),
        ConfigError);
}

TEST_CASE("sweeping a non-numeric key is rejected") {
    const ConfigFile config = ConfigFile::parse_string(minimal_config(), "badsweep2");
    CHECK_THROWS_AS(sweep_scenario(config, "output.methods", {1.0}, "test_out/x"),
                    ConfigError);
    CHECK_THROWS_AS(sweep_scenario(config, "source.type", {1.0}, "test_out/x"),
                    ConfigError);
}

namespace {

std::vector<double> sweep_phase_column(const std::string& csv) {
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);  // hash
    std::getline(lines, line);  // header
    std::vector<double> phases;
    while (std::getline(lines, line)) {
        const auto pos = line.rfind(',');
        const auto pos2 = line.rfind(',', pos - 1);
        phases.push_back(std::stod(line.substr(pos2 + 1, pos - pos2 - 1)));
    }
    return phases;
}

}  // namespace

TEST_CASE("semiclassical sweep over P1 is monotone in magnitude") {
    std::ostringstream extra;
    extra << "upper_arm_probability = 0.5\n";
    std::string text = minimal_config(extra.str(), "semiclassical");
    text += "[semiclassical]\nsteps = 2000\n";
    const ConfigFile config = ConfigFile::parse_string(text, "sweepsc");
    sweep_scenario(config, "interferometer.upper_arm_probability",
                   {0.25, 0.5, 0.75}, "test_out/sweepsc");
    const auto phases = sweep_phase_column(slurp("test_out/sweepsc/sweep.csv"));
    REQUIRE(phases.size() == 3);
    CHECK(std::abs(phases[1]) > std::abs(phases[0]));
    CHECK(std::abs(phases[2]) > std::abs(phases[1]));
    std::filesystem::remove_all("test_out");
}

TEST_CASE("quantum phase magnitude decays with source standoff") {
    const ConfigFile config = ConfigFile::parse_string(minimal_config(), "standoff");
    const std::vector<double> standoffs = {0.35, 0.5, 0.7};
    sweep_scenario(config, "source_trajectory.apex_position_m.z", standoffs,
                   "test_out/standoff");
    const auto phases = sweep_phase_column(slurp("test_out/standoff/sweep.csv"));
    REQUIRE(phases.size() == 3);
    CHECK(std::abs(phases[1]) < std::abs(phases[0]));
    CHECK(std::abs(phases[2]) < std::abs(phases[1]));

    // Oracle: the same potential integral at 10x the time resolution.
    const Scenario base = build_scenario(config);
    const Constants c = base.constants;
    for (std::size_t i = 0; i < standoffs.size(); ++i) {
        InterferometerSpec spec = base.ispec;
        spec.xs0.z = standoffs[i];
        const auto [x1, x2] = mach_zehnder_arms(spec, c);
        const Trajectory xs = parabolic_source(spec);
        const TimeGrid fine(0.0, 2.0 * spec.T, 4001);
        const double oracle =
            phase_potential_integral(x1, x2, xs, spec.m, spec.M, fine, c).delta_phi;
        CHECK(phases[i] == doctest::Approx(oracle).epsilon(1e-6));
    }
    std::filesystem::remove_all("test_out");
}

TEST_CASE("uniform-field scenarios run end to end") {
    std::string text =
        "[interferometer]\n"
        "splitting_hbar_k = 52\n"
        "separation_target_m = 0.25\n"
        "[source]\n"
        "type = uniform_field\n"
        "g_vector_m_per_s2 = 0 0 -9.8\n"
        "[source_trajectory]\n"
        "apex_position_m = 0 0 0\n"
        "acceleration_m_per_s2 = 0 0 0\n"
        "[quadrature]\n"
        "time_samples = 201\n"
        "[output]\n"
        "methods = potential_integral\n";
    Scenario s = build_scenario(ConfigFile::parse_string(text, "uniform"));
    s.out_dir = "test_out/uniform";
    const RunReport report = run_scenario(s);
    REQUIRE(report.rows.size() == 1);
    // Uniform downward field against an upward kick axis: k_eff g T^2 with
    // the potential-integral sign convention.
    const double expected =
        s.ispec.k_eff() * 9.8 * s.ispec.T * s.ispec.T;
    CHECK(report.rows[0].delta_phi == doctest::Approx(expected).epsilon(1e-10));
    std::filesystem::remove_all("test_out");
}

TEST_CASE("field-energy method runs through the scenario pipeline") {
    std::string text = minimal_config("", "potential_integral field_energy");
    ConfigFile config = ConfigFile::parse_string(text, "both_methods");
    Scenario s = build_scenario(config);
    s.time_samples = 51;
    s.out_dir = "test_out/methods";
    const RunReport report = run_scenario(s);
    REQUIRE(report.rows.size() == 2);
    CHECK(report.rows[0].method == "potential_integral");
    CHECK(report.rows[1].method == "field_energy");
    CHECK(report.rows[1].delta_phi ==
          doctest::Approx(report.rows[0].delta_phi).epsilon(1e-6));
    std::filesystem::remove_all("test_out");
}

TEST_CASE("trajectory dump carries the full sample set") {
    std::string text = minimal_config("", "semiclassical");
    text += "[semiclassical]\nsteps = 2000\n";
    ConfigFile config = ConfigFile::parse_string(text, "traj");
    Scenario s = build_scenario(config);
    s.emit_trajectories = true;
    s.out_dir = "test_out/traj";
    run_scenario(s);
    const std::string csv = slurp(s.out_dir + "/trajectories.csv");
    CHECK(csv.find("t_s,x1_x,x1_y,x1_z,x2_x") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2 + 2001);
    std::filesystem::remove_all("test_out");
}

TEST_CASE("branch-state dump uses the documented row format") {
    Scenario s = build_scenario(ConfigFile::parse_string(minimal_config(), "dump"));
    const BranchState state = scenario_branch_state(s);
    ensure_directory("test_out");
    dump_branch_state(state, s.config_hash, 5, "test_out/state.csv");
    const std::string csv = slurp("test_out/state.csv");
    CHECK(csv.find("branch_id,amplitude_re,amplitude_im,phase,particle,t,x,y,z") !=
          std::string::npos);
    // 2 branches x 2 particles with paths x 5 samples.
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2 + 20);
    std::filesystem::remove_all("test_out");
}

TEST_CASE("bundled scenarios load and carry the documented geometry") {
    const Scenario fig2 =
        load_scenario(std::string(GRAVPHASE_SCENARIO_DIR) + "/fig2_quantum.cfg");
    CHECK(fig2.ispec.T == doctest::Approx(0.817004).epsilon(1e-5));
    CHECK(fig2.include_lower);
    CHECK(fig2.baseline == doctest::Approx(0.24));
    CHECK(fig2.probabilities.size() == 3);

    const Scenario app2 = load_scenario(std::string(GRAVPHASE_SCENARIO_DIR) +
                                        "/appendix2_semiclassical.cfg");
    CHECK(app2.methods.size() == 1);
    CHECK(app2.methods[0] == PhaseMethod::semiclassical);
}

TEST_CASE("frames check passes for the bundled-style scenario") {
    Scenario s = build_scenario(ConfigFile::parse_string(minimal_config(), "frames"));
    const FramesReport report = frames_check(s);
    CHECK(report.phases_equal);
    CHECK(report.roundtrip_ok);
    CHECK(report.product_frame_d);
    CHECK(report.rank_frame_a == 2);
}

TEST_CASE("randomized frames scenarios all pass") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const FramesReport report = frames_check_random(seed);
        CHECK(report.phases_equal);
        CHECK(report.roundtrip_ok);
    }
}
