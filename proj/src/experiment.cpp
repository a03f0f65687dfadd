#include "insar/experiment.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "insar/error.hpp"
#include "insar/forward_model.hpp"

namespace insar {

namespace {

constexpr double kDeg = kPi / 180.0;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
        throw ConfigError("expected a number, got '" + std::string(v) + "'");
    }
    return out;
}

std::uint64_t parse_uint(std::string_view v) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ConfigError("expected a non-negative integer, got '" + std::string(v) + "'");
    }
    return out;
}

bool is_auto(std::string_view v) { return v == "auto"; }

bool parse_bool(std::string_view v) {
    if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "off" || v == "no" || v == "0") return false;
    throw ConfigError("expected true/false, got '" + std::string(v) + "'");
}

using Setter = std::function<void(ExperimentConfig&, std::string_view)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        // geometry
        t["geometry.altitude"] = [](auto& c, auto v) { c.geometry.altitude = parse_double(v); };
        t["geometry.velocity"] = [](auto& c, auto v) { c.geometry.velocity = parse_double(v); };
        t["geometry.baseline_length"] = [](auto& c, auto v) {
            c.geometry.baseline_length = parse_double(v);
        };
        t["geometry.baseline_tilt_deg"] = [](auto& c, auto v) {
            c.geometry.baseline_tilt = parse_double(v) * kDeg;
        };
        t["geometry.incidence_angle_deg"] = [](auto& c, auto v) {
            c.geometry.incidence_angle = parse_double(v) * kDeg;
        };
        t["geometry.carrier_frequency"] = [](auto& c, auto v) {
            c.geometry.carrier_frequency = parse_double(v);
        };
        t["geometry.bandwidth"] = [](auto& c, auto v) { c.geometry.bandwidth = parse_double(v); };
        t["geometry.sample_rate"] = [](auto& c, auto v) { c.geometry.sample_rate = parse_double(v); };
        t["geometry.prf"] = [](auto& c, auto v) { c.geometry.prf = parse_double(v); };
        t["geometry.pulse_count"] = [](auto& c, auto v) { c.geometry.pulse_count = parse_uint(v); };
        t["geometry.range_sample_count"] = [](auto& c, auto v) {
            c.auto_range_samples = is_auto(v);
            if (!c.auto_range_samples) c.geometry.range_sample_count = parse_uint(v);
        };
        t["geometry.reference_range"] = [](auto& c, auto v) {
            c.auto_reference_range = is_auto(v);
            if (!c.auto_reference_range) c.geometry.reference_range = parse_double(v);
        };
        // scene
        t["scene.kind"] = [](auto& c, auto v) {
            if (v == "cone") {
                c.scene.kind = SceneKind::Cone;
            } else if (v == "flat") {
                c.scene.kind = SceneKind::Flat;
            } else {
                throw ConfigError("scene.kind must be 'cone' or 'flat', got '" + std::string(v) + "'");
            }
        };
        t["scene.rows"] = [](auto& c, auto v) { c.scene.rows = parse_uint(v); };
        t["scene.cols"] = [](auto& c, auto v) { c.scene.cols = parse_uint(v); };
        t["scene.pixel_spacing"] = [](auto& c, auto v) { c.scene.pixel_spacing = parse_double(v); };
        t["scene.max_height"] = [](auto& c, auto v) { c.scene.max_height = parse_double(v); };
        t["scene.radius"] = [](auto& c, auto v) { c.scene.radius = parse_double(v); };
        t["scene.seed"] = [](auto& c, auto v) { c.scene.seed = parse_uint(v); };
        // sampling / noise
        t["sampling.fraction"] = [](auto& c, auto v) { c.sampling.fraction = parse_double(v); };
        t["sampling.seed"] = [](auto& c, auto v) { c.sampling.seed = parse_uint(v); };
        t["noise.sigma"] = [](auto& c, auto v) { c.noise.sigma = parse_double(v); };
        t["noise.seed"] = [](auto& c, auto v) { c.noise.seed = parse_uint(v); };
        // imaging
        t["imaging.upsample_factor"] = [](auto& c, auto v) {
            c.imaging.upsample_factor = parse_uint(v);
        };
        t["imaging.metrics_border"] = [](auto& c, auto v) { c.imaging.metrics_border = parse_uint(v); };
        t["imaging.coherence_window"] = [](auto& c, auto v) {
            c.imaging.coherence_window = parse_uint(v);
        };
        // solver
        t["solver.lambda"] = [](auto& c, auto v) {
            if (is_auto(v)) {
                c.solver.lambda.reset();
            } else {
                c.solver.lambda = parse_double(v);
            }
        };
        t["solver.lambda_scale"] = [](auto& c, auto v) { c.solver.lambda_scale = parse_double(v); };
        t["solver.step"] = [](auto& c, auto v) {
            if (is_auto(v)) {
                c.solver.step_mu.reset();
            } else {
                c.solver.step_mu = parse_double(v);
            }
        };
        t["solver.max_iterations"] = [](auto& c, auto v) { c.solver.max_iterations = parse_uint(v); };
        t["solver.tolerance"] = [](auto& c, auto v) { c.solver.tolerance = parse_double(v); };
        t["solver.power_iterations"] = [](auto& c, auto v) {
            c.solver.norm_power_iterations = parse_uint(v);
        };
        t["solver.init"] = [](auto& c, auto v) {
            if (v == "zero") {
                c.solver.init = SolverInit::Zero;
            } else if (v == "bp") {
                c.solver.init = SolverInit::Bp;
            } else {
                throw ConfigError("solver.init must be 'zero' or 'bp', got '" + std::string(v) + "'");
            }
        };
        t["output.directory"] = [](auto& c, auto v) { c.output_directory = std::string(v); };
        t["output.record_timing"] = [](auto& c, auto v) { c.record_timing = parse_bool(v); };
        return t;
    }();
    return table;
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

void ExperimentConfig::override_seed(std::uint64_t base) {
    scene.seed = base;
    sampling.seed = base + 1;
    noise.seed = base + 2;
}

ExperimentConfig parse_config(std::string_view text, std::string_view source) {
    ExperimentConfig cfg;
    std::set<std::string> seen;
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        const auto where = [&] { return std::string(source) + ":" + std::to_string(line_no) + ": "; };

        if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where() + "unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            static const std::set<std::string> known{"geometry", "scene",   "sampling", "noise",
                                                     "imaging",  "solver", "output"};
            if (!known.contains(section)) {
                throw ConfigError(where() + "unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where() + "expected 'key = value'");
        if (section.empty()) throw ConfigError(where() + "key outside of any [section]");
        const std::string key = section + "." + std::string(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) throw ConfigError(where() + "unknown key '" + key + "'");
        if (!seen.insert(key).second) throw ConfigError(where() + "duplicate key '" + key + "'");
        if (value.empty()) throw ConfigError(where() + "missing value for '" + key + "'");
        try {
            it->second(cfg, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where() + key + ": " + e.what());
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.string());
}

std::string default_config_text() {
    const ExperimentConfig c;
    const AcquisitionGeometry& g = c.geometry;
    std::ostringstream os;
    os << "[geometry]\n"
       << "altitude = " << format_double(g.altitude) << "\n"
       << "velocity = " << format_double(g.velocity) << "\n"
       << "baseline_length = " << format_double(g.baseline_length) << "\n"
       << "baseline_tilt_deg = " << format_double(g.baseline_tilt / kDeg) << "\n"
       << "incidence_angle_deg = 35\n"
       << "carrier_frequency = " << format_double(g.carrier_frequency) << "\n"
       << "bandwidth = " << format_double(g.bandwidth) << "\n"
       << "sample_rate = " << format_double(g.sample_rate) << "\n"
       << "prf = " << format_double(g.prf) << "\n"
       << "pulse_count = " << g.pulse_count << "\n"
       << "range_sample_count = auto\n"
       << "reference_range = auto\n\n"
       << "[scene]\n"
       << "kind = cone\n"
       << "rows = " << c.scene.rows << "\n"
       << "cols = " << c.scene.cols << "\n"
       << "pixel_spacing = " << format_double(c.scene.pixel_spacing) << "\n"
       << "max_height = " << format_double(c.scene.max_height) << "\n"
       << "radius = " << format_double(c.scene.radius) << "\n"
       << "seed = " << c.scene.seed << "\n\n"
       << "[sampling]\n"
       << "fraction = " << format_double(c.sampling.fraction) << "\n"
       << "seed = " << c.sampling.seed << "\n\n"
       << "[noise]\n"
       << "sigma = " << format_double(c.noise.sigma) << "\n"
       << "seed = " << c.noise.seed << "\n\n"
       << "[imaging]\n"
       << "upsample_factor = " << c.imaging.upsample_factor << "\n"
       << "metrics_border = " << c.imaging.metrics_border << "\n"
       << "coherence_window = " << c.imaging.coherence_window << "\n\n"
       << "[solver]\n"
       << "lambda = auto\n"
       << "lambda_scale = " << format_double(c.solver.lambda_scale) << "\n"
       << "step = auto\n"
       << "max_iterations = " << c.solver.max_iterations << "\n"
       << "tolerance = " << format_double(c.solver.tolerance) << "\n"
       << "power_iterations = " << c.solver.norm_power_iterations << "\n"
       << "init = zero\n\n"
       << "[output]\n"
       << "directory = " << c.output_directory.string() << "\n"
       << "record_timing = false\n";
    return os.str();
}

Experiment resolve(const ExperimentConfig& config) {
    Experiment e{config, config.geometry, {}};
    const SceneConfig& s = config.scene;
    if (s.rows < 2 || s.cols < 2) throw ConfigError("scene.rows and scene.cols must be >= 2");
    if (!(s.pixel_spacing > 0.0)) throw ConfigError("scene.pixel_spacing must be > 0");
    if (!(s.max_height >= 0.0)) throw ConfigError("scene.max_height must be >= 0");
    if (!(config.noise.sigma >= 0.0)) throw ConfigError("noise.sigma must be >= 0");
    if (!(config.sampling.fraction > 0.0 && config.sampling.fraction <= 1.0)) {
        throw ConfigError("sampling.fraction must be in (0, 1]");
    }
    const std::size_t w = config.imaging.coherence_window;
    if (w < 3 || w % 2 == 0 || w > s.rows || w > s.cols) {
        throw ConfigError("imaging.coherence_window must be odd, >= 3 and fit the grid");
    }
    if (2 * config.imaging.metrics_border >= std::min(s.rows, s.cols)) {
        throw ConfigError("imaging.metrics_border leaves no pixels to evaluate");
    }
    if (e.geometry.pulse_count == 0) throw ConfigError("geometry.pulse_count must be > 0");
    e.grid = centered_grid(e.geometry, s.rows, s.cols, s.pixel_spacing);
    if (config.auto_reference_range || config.auto_range_samples) {
        const AcquisitionGeometry fitted = fit_swath(e.geometry, e.grid);
        if (config.auto_reference_range) e.geometry.reference_range = fitted.reference_range;
        if (config.auto_range_samples) {
            const double far = fitted.reference_range +
                               static_cast<double>(fitted.range_sample_count) *
                                   fitted.range_sample_spacing();
            const double span = far - e.geometry.reference_range;
            const auto n = static_cast<std::size_t>(
                std::ceil(std::max(span, 0.0) / e.geometry.range_sample_spacing()));
            e.geometry.range_sample_count = std::max<std::size_t>(32, (n + 31) / 32 * 32);
        }
    }
    e.geometry.validate();
    config.solver.validate();
    if (config.imaging.upsample_factor == 0 ||
        (config.imaging.upsample_factor & (config.imaging.upsample_factor - 1)) != 0) {
        throw ConfigError("imaging.upsample_factor must be a power of two");
    }
    return e;
}

std::string manifest_json(const Experiment& e) {
    const ExperimentConfig& c = e.config;
    const AcquisitionGeometry& g = e.geometry;
    nlohmann::ordered_json j;
    j["geometry"] = {{"altitude", g.altitude},
                     {"velocity", g.velocity},
                     {"baseline_length", g.baseline_length},
                     {"baseline_tilt_deg", g.baseline_tilt / kDeg},
                     {"incidence_angle_deg", g.incidence_angle / kDeg},
                     {"carrier_frequency", g.carrier_frequency},
                     {"bandwidth", g.bandwidth},
                     {"sample_rate", g.sample_rate},
                     {"prf", g.prf},
                     {"pulse_count", g.pulse_count},
                     {"range_sample_count", g.range_sample_count},
                     {"reference_range", g.reference_range},
                     {"wavelength", g.wavelength()},
                     {"speed_of_light", kSpeedOfLight}};
    j["grid"] = {{"rows", e.grid.rows},
                 {"cols", e.grid.cols},
                 {"spacing", e.grid.spacing},
                 {"origin", e.grid.origin}};
    j["scene"] = {{"kind", c.scene.kind == SceneKind::Cone ? "cone" : "flat"},
                  {"rows", c.scene.rows},
                  {"cols", c.scene.cols},
                  {"pixel_spacing", c.scene.pixel_spacing},
                  {"max_height", c.scene.kind == SceneKind::Cone ? c.scene.max_height : 0.0},
                  {"radius", c.scene.radius},
                  {"seed", c.scene.seed}};
    j["sampling"] = {{"fraction", c.sampling.fraction}, {"seed", c.sampling.seed}};
    j["noise"] = {{"sigma", c.noise.sigma}, {"seed", c.noise.seed}};
    j["imaging"] = {{"upsample_factor", c.imaging.upsample_factor},
                    {"metrics_border", c.imaging.metrics_border},
                    {"coherence_window", c.imaging.coherence_window}};
    nlohmann::ordered_json solver;
    solver["lambda"] = c.solver.lambda ? nlohmann::ordered_json(*c.solver.lambda)
                                       : nlohmann::ordered_json("auto");
    solver["lambda_scale"] = c.solver.lambda_scale;
    solver["step"] = c.solver.step_mu ? nlohmann::ordered_json(*c.solver.step_mu)
                                      : nlohmann::ordered_json("auto");
    solver["max_iterations"] = c.solver.max_iterations;
    solver["tolerance"] = c.solver.tolerance;
    solver["power_iterations"] = c.solver.norm_power_iterations;
    solver["init"] = c.solver.init == SolverInit::Zero ? "zero" : "bp";
    j["solver"] = solver;
    j["output"] = {{"directory", c.output_directory.string()},
                   {"record_timing", c.record_timing}};
    return j.dump(2) + "\n";
}

SceneModel build_scene(const Experiment& e) {
    const SceneConfig& s = e.config.scene;
    const double height = s.kind == SceneKind::Cone ? s.max_height : 0.0;
    return make_cone_scene(e.grid, height, s.seed, s.radius);
}

SamplingMask build_mask(const Experiment& e) {
    if (e.config.sampling.fraction >= 1.0) {
        SamplingMask mask = full_mask(e.geometry.pulse_count);
        mask.seed = e.config.sampling.seed;
        return mask;
    }
    return random_pulse_mask(e.geometry.pulse_count, e.config.sampling.fraction,
                             e.config.sampling.seed);
}

Simulation simulate(const Experiment& e) {
    Simulation sim;
    sim.scene = build_scene(e);
    sim.truth = ideal_interferogram(sim.scene, e.geometry);
    sim.mask = build_mask(e);
    const double sigma = e.config.noise.sigma;
    const std::uint64_t seed = e.config.noise.seed;
    sim.master = apply_mask(simulate_echo(sim.scene, e.geometry, AntennaId::Master, sigma, seed),
                            sim.mask);
    sim.slave = apply_mask(
        simulate_echo(sim.scene, e.geometry, AntennaId::Slave, sigma, seed + 0x9E3779B97F4A7C15ull),
        sim.mask);
    return sim;
}

BpResult run_bp(const Experiment& e, const EchoMatrix& master, const EchoMatrix& slave) {
    const std::size_t n_up = e.config.imaging.upsample_factor;
    BpResult r;
    r.master = bp_image(master, e.geometry, AntennaId::Master, n_up, e.grid);
    r.slave = bp_image(slave, e.geometry, AntennaId::Slave, n_up, e.grid);
    r.interferogram = form_interferogram(r.master, r.slave);
    return r;
}

SolveResult run_reconstruction(const Experiment& e, const EchoMatrix& master,
                               const EchoMatrix& slave, const SamplingMask& mask) {
    const std::size_t n_up = e.config.imaging.upsample_factor;
    const ComplexImage slave_image = bp_image(slave, e.geometry, AntennaId::Slave, n_up, e.grid);
    const ObservationOperator op(e.geometry, slave_image, mask, n_up);
    if (e.config.solver.init == SolverInit::Bp) {
        const ComplexImage master_image =
            bp_image(master, e.geometry, AntennaId::Master, n_up, e.grid);
        const ComplexGrid init =
            bp_initial_guess(op, master.data, form_interferogram(master_image, slave_image));
        return solve(op, master.data, e.config.solver, &init);
    }
    return solve(op, master.data, e.config.solver);
}

}  // namespace insar
