#include <doctest.h>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "insar/commands.hpp"
#include "insar/error.hpp"
#include "insar/experiment.hpp"
#include "insar/io.hpp"

using namespace insar;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("insar_exp_" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string small_config(const std::string& extra_solver = "", const std::string& sampling = "1",
                         const std::string& kind = "cone") {
    return "[geometry]\npulse_count = 48\n"
           "[scene]\nkind = " + kind + "\nrows = 16\ncols = 16\nmax_height = 10\n"
           "[sampling]\nfraction = " + sampling + "\n"
           "[imaging]\nupsample_factor = 4\ncoherence_window = 3\n"
           "[solver]\npower_iterations = 10\n" + extra_solver;
}

Experiment small(const std::string& extra_solver = "", const std::string& sampling = "1",
                 const std::string& kind = "cone") {
    return resolve(parse_config(small_config(extra_solver, sampling, kind)));
}

std::string error_of(const std::string& text) {
    try {
        parse_config(text, "test.ini");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::size_t line_count(const std::string& s) {
    std::size_t n = 0;
    for (char ch : s) n += ch == '\n';
    return n;
}

}  // namespace

TEST_CASE("default config text parses back to the defaults") {
    const ExperimentConfig d;
    const ExperimentConfig c = parse_config(default_config_text());
    CHECK(c.geometry.altitude == d.geometry.altitude);
    CHECK(c.geometry.velocity == d.geometry.velocity);
    CHECK(c.geometry.baseline_length == d.geometry.baseline_length);
    CHECK(c.geometry.incidence_angle == doctest::Approx(d.geometry.incidence_angle).epsilon(1e-15));
    CHECK(c.geometry.carrier_frequency == d.geometry.carrier_frequency);
    CHECK(c.geometry.bandwidth == d.geometry.bandwidth);
    CHECK(c.geometry.sample_rate == d.geometry.sample_rate);
    CHECK(c.geometry.prf == d.geometry.prf);
    CHECK(c.geometry.pulse_count == d.geometry.pulse_count);
    CHECK(c.auto_reference_range);
    CHECK(c.auto_range_samples);
    CHECK(c.scene.rows == 64);
    CHECK(c.scene.cols == 64);
    CHECK(c.scene.pixel_spacing == 300.0 / 64.0);
    CHECK(c.scene.max_height == 40.0);
    CHECK(c.sampling.fraction == 1.0);
    CHECK(c.noise.sigma == 0.0);
    CHECK(c.imaging.upsample_factor == 8);
    CHECK(c.imaging.coherence_window == 5);
    CHECK_FALSE(c.solver.lambda.has_value());
    CHECK_FALSE(c.solver.step_mu.has_value());
    CHECK(c.solver.lambda_scale == 0.01);
    CHECK(c.solver.max_iterations == 5);
    CHECK(c.solver.tolerance == 1e-4);
    CHECK(c.solver.init == SolverInit::Zero);
    CHECK_FALSE(c.record_timing);
}

TEST_CASE("default acquisition geometry") {
    const AcquisitionGeometry g = parse_config("").geometry;
    CHECK(g.altitude == 3000.0);
    CHECK(g.velocity == 50.0);
    CHECK(g.baseline_length == 1.0);
    CHECK(g.carrier_frequency == 35e9);
    CHECK(g.bandwidth == 400e6);
    CHECK(g.sample_rate == 500e6);
    CHECK(g.prf == 1000.0);
    CHECK(g.pulse_count == 128);
}

TEST_CASE("config values, comments and whitespace") {
    const ExperimentConfig c = parse_config(
        "# header\n[scene]\n  kind = flat  \nrows=8\n; note\n\n[solver]\nlambda = 2.5\nstep = 0.1\n"
        "init = bp\n[output]\nrecord_timing = yes\ndirectory = some/where\n");
    CHECK(c.scene.kind == SceneKind::Flat);
    CHECK(c.scene.rows == 8);
    CHECK(*c.solver.lambda == 2.5);
    CHECK(*c.solver.step_mu == 0.1);
    CHECK(c.solver.init == SolverInit::Bp);
    CHECK(c.record_timing);
    CHECK(c.output_directory == fs::path("some/where"));
}

TEST_CASE("config errors name the line") {
    CHECK(error_of("[scene]\nrows = 8\nbogus = 1\n").find("test.ini:3") != std::string::npos);
    CHECK(error_of("[scene]\nrows = 8\nbogus = 1\n").find("scene.bogus") != std::string::npos);
    CHECK(error_of("[nowhere]\n").find("test.ini:1") != std::string::npos);
    CHECK(error_of("[scene]\nrows = 8\nrows = 9\n").find("test.ini:3") != std::string::npos);
    CHECK(error_of("[scene]\nrows = 8\nrows = 9\n").find("duplicate") != std::string::npos);
    CHECK(error_of("[noise]\n\nsigma = abc\n").find("test.ini:3") != std::string::npos);
    CHECK(error_of("[scene]\nrows = -3\n").find("test.ini:2") != std::string::npos);
    CHECK(error_of("[scene]\nkind = sphere\n").find("test.ini:2") != std::string::npos);
    CHECK(error_of("rows = 3\n").find("test.ini:1") != std::string::npos);
    CHECK(error_of("[scene\n").find("test.ini:1") != std::string::npos);
    CHECK(error_of("[scene]\nrows\n").find("test.ini:2") != std::string::npos);
    CHECK(error_of("[output]\nrecord_timing = maybe\n").find("test.ini:2") != std::string::npos);
    CHECK(error_of("[scene]\nrows = 8\n") == "");
}

TEST_CASE("resolve rejects inconsistent configs") {
    CHECK_THROWS_AS(resolve(parse_config("[sampling]\nfraction = 0\n")), ConfigError);
    CHECK_THROWS_AS(resolve(parse_config("[sampling]\nfraction = 1.5\n")), ConfigError);
    CHECK_THROWS_AS(resolve(parse_config("[noise]\nsigma = -1\n")), ConfigError);
    CHECK_THROWS_AS(resolve(parse_config("[imaging]\nupsample_factor = 6\n")), ConfigError);
    CHECK_THROWS_AS(resolve(parse_config("[imaging]\ncoherence_window = 4\n")), ConfigError);
    CHECK_THROWS_AS(resolve(parse_config("[imaging]\nmetrics_border = 32\n")), ConfigError);
    CHECK_THROWS_AS(resolve(parse_config("[scene]\nrows = 1\n")), ConfigError);
    CHECK_THROWS_AS(resolve(parse_config("[solver]\nlambda = -1\n")), ConfigError);
    CHECK_THROWS_AS(resolve(parse_config("[geometry]\nprf = 0\n")), ConfigError);
    CHECK_THROWS_AS(load_config("/definitely/not/here.ini"), ConfigError);
}

TEST_CASE("seed override") {
    ExperimentConfig c;
    c.override_seed(100);
    CHECK(c.scene.seed == 100);
    CHECK(c.sampling.seed == 101);
    CHECK(c.noise.seed == 102);
}

TEST_CASE("auto swath fit covers the grid") {
    const Experiment e = resolve(parse_config(""));
    CHECK(e.geometry.reference_range > 0.0);
    CHECK(e.geometry.range_sample_count % 32 == 0);
    const double far = e.geometry.reference_range +
                       double(e.geometry.range_sample_count) * e.geometry.range_sample_spacing();
    for (std::size_t r = 0; r < e.grid.rows; r += 7) {
        for (std::size_t c = 0; c < e.grid.cols; c += 7) {
            for (std::size_t n : {std::size_t{0}, e.geometry.pulse_count - 1}) {
                for (AntennaId a : {AntennaId::Master, AntennaId::Slave}) {
                    const double range = slant_range(e.geometry, a, n, e.grid.node(r, c));
                    CHECK(range > e.geometry.reference_range);
                    CHECK(range < far);
                }
            }
        }
    }

    const Experiment fixed =
        resolve(parse_config("[geometry]\nreference_range = 3600\nrange_sample_count = 2048\n"));
    CHECK(fixed.geometry.reference_range == 3600.0);
    CHECK(fixed.geometry.range_sample_count == 2048);
}

TEST_CASE("manifest records every config key") {
    const Experiment e = resolve(parse_config(""));
    const auto j = nlohmann::json::parse(manifest_json(e));
    std::istringstream text(default_config_text());
    std::string line;
    std::string section;
    std::size_t keys = 0;
    while (std::getline(text, line)) {
        if (line.empty()) continue;
        if (line.front() == '[') {
            section = line.substr(1, line.size() - 2);
            continue;
        }
        const std::string key = line.substr(0, line.find(' '));
        INFO(section << "." << key);
        REQUIRE(j.contains(section));
        CHECK(j[section].contains(key));
        ++keys;
    }
    CHECK(keys == 35);
    CHECK(j["geometry"]["reference_range"] == e.geometry.reference_range);
    CHECK(j["geometry"]["range_sample_count"] == e.geometry.range_sample_count);
}

TEST_CASE("simulate is reproducible and full sampling keeps every pulse") {
    TempDir a;
    TempDir b;
    const Experiment e = small();
    commands::simulate(e, a.path);
    commands::simulate(e, b.path);
    for (const char* name : {commands::kManifest, commands::kEchoMaster, commands::kEchoSlave,
                             commands::kMask, commands::kHeight, commands::kIdealPhase,
                             commands::kSpeckle, commands::kReflectivity}) {
        INFO(name);
        CHECK(slurp(a.path / name) == slurp(b.path / name));
    }
    const RealGrid mask = io::read_real_grid(a.path / commands::kMask);
    CHECK(mask.size() == 48);
    for (double m : mask.values()) CHECK(m == 1.0);
    const ComplexGrid echo = io::read_complex_grid(a.path / commands::kEchoMaster);
    CHECK(echo.rows() == 48);
    CHECK(echo.cols() == e.geometry.range_sample_count);
    const RealGrid ideal = io::read_real_grid(a.path / commands::kIdealPhase);
    CHECK(ideal.rows() == 16);
    CHECK(ideal.cols() == 16);
}

TEST_CASE("partial sampling zeroes the dropped pulses") {
    TempDir dir;
    const Experiment e = small("", "0.5");
    commands::simulate(e, dir.path);
    const RealGrid mask = io::read_real_grid(dir.path / commands::kMask);
    const ComplexGrid echo = io::read_complex_grid(dir.path / commands::kEchoMaster);
    std::size_t kept = 0;
    for (std::size_t n = 0; n < mask.size(); ++n) {
        kept += mask[n] == 1.0;
        if (mask[n] == 0.0) {
            for (std::size_t k = 0; k < echo.cols(); ++k) CHECK(echo(n, k) == cdouble{});
        }
    }
    CHECK(kept == 24);
}

TEST_CASE("flat scene BP phase is close to zero") {
    TempDir dir;
    const Experiment e = small("", "1", "flat");
    commands::simulate(e, dir.path);
    const auto row = commands::bp(e, commands::default_echo_paths(dir.path), dir.path);
    CHECK(row.method == "bp");
    CHECK(row.metrics.rmse_rad < 0.1);
    CHECK(row.metrics.residue_count == 0);
    const ComplexGrid ifg = io::read_complex_grid(dir.path / commands::kBpInterferogram);
    CHECK(ifg.rows() == 16);
    CHECK(ifg.cols() == 16);
    CHECK(fs::exists(dir.path / "bp_phase.png"));
    const std::string csv = slurp(dir.path / commands::kMetricsBp);
    CHECK(csv.rfind(commands::kMetricsHeader, 0) == 0);
    CHECK(line_count(csv) == 2);
}

TEST_CASE("reconstruct writes a bounded solve report") {
    TempDir dir;
    const Experiment e = small();
    commands::simulate(e, dir.path);
    std::ostringstream log;
    const auto row = commands::reconstruct(e, commands::default_echo_paths(dir.path), dir.path, log);
    CHECK(row.method == "proposed");
    CHECK(log.str().empty());
    const std::string report = slurp(dir.path / commands::kSolveReport);
    CHECK(report.rfind("iteration,data_term,penalty,residual_norm", 0) == 0);
    CHECK(line_count(report) >= 2);
    CHECK(line_count(report) <= 1 + e.config.solver.max_iterations);
    const ComplexGrid theta = io::read_complex_grid(dir.path / commands::kProposedInterferogram);
    CHECK(theta.rows() == 16);
    CHECK(io::read_complex_grid(dir.path / commands::kProposedSpectrum).cols() == 16);
    CHECK(fs::exists(dir.path / "proposed_phase.png"));
}

TEST_CASE("huge lambda warns and yields a zero reconstruction") {
    TempDir dir;
    const Experiment e = small("lambda = 1e30\n");
    commands::simulate(e, dir.path);
    std::ostringstream log;
    commands::reconstruct(e, commands::default_echo_paths(dir.path), dir.path, log);
    CHECK(log.str().find("warning") != std::string::npos);
    const ComplexGrid theta = io::read_complex_grid(dir.path / commands::kProposedInterferogram);
    for (const cdouble& v : theta.values()) CHECK(v == cdouble{});
}

TEST_CASE("evaluate reproduces stored metrics and builds the comparison table") {
    TempDir dir;
    const Experiment e = small();
    commands::simulate(e, dir.path);
    const auto bp_row = commands::bp(e, commands::default_echo_paths(dir.path), dir.path);
    std::ostringstream log;
    const auto pr_row =
        commands::reconstruct(e, commands::default_echo_paths(dir.path), dir.path, log);

    std::ostringstream table;
    const auto rows = commands::evaluate(e, {dir.path}, dir.path, table);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].method == "bp");
    CHECK(rows[1].method == "proposed");
    CHECK(commands::format_metrics_row(rows[0]) == commands::format_metrics_row(bp_row));
    CHECK(commands::format_metrics_row(rows[1]) == commands::format_metrics_row(pr_row));
    CHECK(line_count(slurp(dir.path / commands::kComparison)) == 3);
    CHECK(table.str().find("proposed") != std::string::npos);
}

TEST_CASE("comparison over two sampling fractions has four rows") {
    TempDir full;
    TempDir half;
    TempDir out;
    const Experiment ef = small();
    const Experiment eh = small("", "0.5");
    std::ostringstream log;
    for (const auto& [e, dir] : {std::pair{ef, full.path}, std::pair{eh, half.path}}) {
        commands::simulate(e, dir);
        commands::bp(e, commands::default_echo_paths(dir), dir);
        commands::reconstruct(e, commands::default_echo_paths(dir), dir, log);
    }
    std::ostringstream table;
    const auto rows = commands::evaluate(ef, {full.path, half.path}, out.path, table);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].sampling_fraction == 1.0);
    CHECK(rows[3].sampling_fraction == 0.5);
    CHECK(line_count(slurp(out.path / commands::kComparison)) == 5);
}

TEST_CASE("mismatched inputs are rejected") {
    TempDir dir;
    const Experiment e = small();
    commands::simulate(e, dir.path);
    TempDir other;
    const Experiment bigger = resolve(parse_config(
        "[geometry]\npulse_count = 32\n[scene]\nrows = 16\ncols = 16\n[imaging]\nupsample_factor = 4\n"));
    CHECK_THROWS_AS(commands::bp(bigger, commands::default_echo_paths(dir.path), other.path),
                    ShapeError);
    CHECK_THROWS_AS(commands::bp(e, commands::default_echo_paths(other.path), other.path), IoError);
}
