#include "insar/commands.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "insar/error.hpp"
#include "insar/io.hpp"

namespace insar::commands {

namespace fs = std::filesystem;

namespace {

using clock = std::chrono::steady_clock;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw IoError("error writing " + path.string());
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path sidecar(const fs::path& grid) {
    fs::path p = grid;
    p += ".json";
    return p;
}

void write_sidecar(const fs::path& grid, const std::string& method, double fraction) {
    nlohmann::ordered_json j{{"method", method}, {"sampling_fraction", fraction}};
    write_text(sidecar(grid), j.dump(2) + "\n");
}

void require_grid(const ComplexGrid& g, const ImagingGrid& grid, const fs::path& path) {
    if (g.rows() != grid.rows || g.cols() != grid.cols) {
        throw ShapeError(path.string() + ": grid is " + std::to_string(g.rows()) + "x" +
                         std::to_string(g.cols()) + ", config expects " +
                         std::to_string(grid.rows) + "x" + std::to_string(grid.cols));
    }
}

EchoMatrix load_echo(const Experiment& e, const fs::path& path, AntennaId antenna) {
    EchoMatrix echo{io::read_complex_grid(path), antenna};
    if (echo.data.rows() != e.geometry.pulse_count ||
        echo.data.cols() != e.geometry.range_sample_count) {
        throw ShapeError(path.string() + ": echo shape does not match the config geometry");
    }
    return echo;
}

// Prefers the output directory, then the directory holding the master echo.
fs::path locate(const fs::path& out, const EchoPaths& echoes, const char* name) {
    if (fs::exists(out / name)) return out / name;
    return echoes.master.parent_path() / name;
}

// Keeps a copy of the ideal phase next to every interferogram for evaluate.
RealGrid load_truth(const fs::path& out, const EchoPaths& echoes) {
    const fs::path path = locate(out, echoes, kIdealPhase);
    if (!fs::exists(path)) throw IoError(path.string() + ": ideal phase not found");
    if (path != out / kIdealPhase) fs::copy_file(path, out / kIdealPhase);
    return io::read_real_grid(path);
}

SamplingMask load_mask(const Experiment& e, const fs::path& out, const EchoPaths& echoes) {
    const fs::path path = locate(out, echoes, kMask);
    if (!fs::exists(path)) return build_mask(e);
    const RealGrid stored = io::read_real_grid(path);
    if (stored.size() != e.geometry.pulse_count) {
        throw ShapeError(path.string() + ": mask length does not match pulse_count");
    }
    SamplingMask mask;
    mask.fraction = e.config.sampling.fraction;
    mask.seed = e.config.sampling.seed;
    for (double v : stored.values()) mask.kept_pulses.push_back(v != 0.0 ? 1 : 0);
    return mask;
}

std::unique_ptr<RegionMask> metrics_region(const Experiment& e) {
    if (e.config.imaging.metrics_border == 0) return nullptr;
    return std::make_unique<RegionMask>(
        border_region(e.grid.rows, e.grid.cols, e.config.imaging.metrics_border));
}

PhaseMetrics score(const Experiment& e, const ComplexGrid& estimate, const RealGrid& truth) {
    const auto region = metrics_region(e);
    return evaluate_phase(estimate, truth, e.config.imaging.coherence_window, region.get());
}

}  // namespace

std::string format_metrics_row(const MetricsRow& row) {
    return row.method + "," + num(row.sampling_fraction) + "," + num(row.metrics.rmse_rad) + "," +
           num(row.metrics.mean_coherence) + "," + std::to_string(row.metrics.residue_count) +
           "," + (row.seconds >= 0.0 ? num(row.seconds) : std::string());
}

std::string format_solve_report(const SolveReport& report, bool with_timing) {
    std::string out = "iteration,data_term,penalty,residual_norm,seconds\n";
    for (std::size_t k = 0; k < report.iterations(); ++k) {
        out += std::to_string(k + 1) + "," + num(report.data_term[k]) + "," +
               num(report.penalty[k]) + "," + num(report.residual_norm[k]) + "," +
               (with_timing ? num(report.seconds[k]) : std::string()) + "\n";
    }
    return out;
}

EchoPaths default_echo_paths(const fs::path& dir) {
    return {dir / kEchoMaster, dir / kEchoSlave};
}

void simulate(const Experiment& e, const fs::path& out) {
    fs::create_directories(out);
    const Simulation sim = insar::simulate(e);
    const double spacing = e.grid.spacing;
    write_text(out / kManifest, manifest_json(e));
    io::write_grid(out / kHeight, sim.scene.height, spacing);
    io::write_grid(out / kReflectivity, sim.scene.reflectivity, spacing);
    io::write_grid(out / kSpeckle, sim.scene.speckle_phase, spacing);
    io::write_grid(out / kIdealPhase, sim.truth.phase, spacing);
    io::export_phase_png(sim.truth.phase, out / "ideal_phase.png");
    RealGrid mask(1, sim.mask.kept_pulses.size());
    for (std::size_t n = 0; n < mask.size(); ++n) mask[n] = sim.mask.kept_pulses[n] ? 1.0 : 0.0;
    io::write_grid(out / kMask, mask, 0.0);
    io::write_grid(out / kEchoMaster, sim.master.data, 0.0);
    io::write_grid(out / kEchoSlave, sim.slave.data, 0.0);
}

MetricsRow bp(const Experiment& e, const EchoPaths& echoes, const fs::path& out) {
    fs::create_directories(out);
    const EchoMatrix master = load_echo(e, echoes.master, AntennaId::Master);
    const EchoMatrix slave = load_echo(e, echoes.slave, AntennaId::Slave);
    const auto start = clock::now();
    const BpResult result = run_bp(e, master, slave);
    const double seconds = std::chrono::duration<double>(clock::now() - start).count();

    const double spacing = e.grid.spacing;
    io::write_grid(out / kBpMaster, result.master.data, spacing);
    io::write_grid(out / kBpSlave, result.slave.data, spacing);
    io::write_grid(out / kBpInterferogram, result.interferogram.data, spacing);
    write_sidecar(out / kBpInterferogram, "bp", e.config.sampling.fraction);
    io::export_phase_png(result.interferogram.data, out / "bp_phase.png");

    const RealGrid truth = load_truth(out, echoes);
    MetricsRow row{"bp", e.config.sampling.fraction, score(e, result.interferogram.data, truth),
                   e.config.record_timing ? seconds : -1.0};
    write_text(out / kMetricsBp, std::string(kMetricsHeader) + "\n" + format_metrics_row(row) + "\n");
    return row;
}

MetricsRow reconstruct(const Experiment& e, const EchoPaths& echoes, const fs::path& out,
                       std::ostream& log) {
    fs::create_directories(out);
    const EchoMatrix master = load_echo(e, echoes.master, AntennaId::Master);
    const EchoMatrix slave = load_echo(e, echoes.slave, AntennaId::Slave);
    const SamplingMask mask = load_mask(e, out, echoes);

    const auto start = clock::now();
    SolveResult result;
    try {
        result = run_reconstruction(e, master, slave, mask);
    } catch (const SolverDivergence& d) {
        write_text(out / kSolveReport, format_solve_report(d.report(), e.config.record_timing));
        throw;
    }
    const double seconds = std::chrono::duration<double>(clock::now() - start).count();

    write_text(out / kSolveReport, format_solve_report(result.report, e.config.record_timing));
    const double spacing = e.grid.spacing;
    io::write_grid(out / kProposedInterferogram, result.theta.data, spacing);
    write_sidecar(out / kProposedInterferogram, "proposed", e.config.sampling.fraction);
    io::write_grid(out / kProposedSpectrum, result.theta_f, spacing);
    io::export_phase_png(result.theta.data, out / "proposed_phase.png");

    if (result.report.sparsity == 1.0) {
        log << "warning: regularization removed every coefficient; the reconstruction is zero "
               "(lambda = "
            << result.report.lambda << ")\n";
    }

    const RealGrid truth = load_truth(out, echoes);
    MetricsRow row{"proposed", e.config.sampling.fraction, score(e, result.theta.data, truth),
                   e.config.record_timing ? seconds : -1.0};
    write_text(out / kMetricsProposed,
               std::string(kMetricsHeader) + "\n" + format_metrics_row(row) + "\n");
    return row;
}

std::vector<MetricsRow> evaluate(const Experiment& e, const std::vector<fs::path>& inputs,
                                 const fs::path& out, std::ostream& table) {
    std::vector<fs::path> grids;
    for (const fs::path& input : inputs) {
        if (fs::is_directory(input)) {
            bool found = false;
            for (const char* name : {kBpInterferogram, kProposedInterferogram}) {
                if (fs::exists(input / name)) {
                    grids.push_back(input / name);
                    found = true;
                }
            }
            if (!found) throw IoError(input.string() + ": no interferograms found");
        } else {
            grids.push_back(input);
        }
    }
    if (grids.empty()) throw ConfigError("evaluate needs at least one interferogram");

    std::vector<MetricsRow> rows;
    for (const fs::path& path : grids) {
        const ComplexGrid estimate = io::read_complex_grid(path);
        require_grid(estimate, e.grid, path);
        const RealGrid truth = io::read_real_grid(path.parent_path() / kIdealPhase);
        MetricsRow row;
        row.method = path.stem().string();
        row.sampling_fraction = e.config.sampling.fraction;
        if (fs::exists(sidecar(path))) {
            const auto meta = nlohmann::json::parse(read_text(sidecar(path)));
            row.method = meta.value("method", row.method);
            row.sampling_fraction = meta.value("sampling_fraction", row.sampling_fraction);
        }
        row.metrics = score(e, estimate, truth);
        rows.push_back(row);
    }

    std::string csv = std::string(kMetricsHeader) + "\n";
    for (const MetricsRow& row : rows) csv += format_metrics_row(row) + "\n";
    fs::create_directories(out);
    write_text(out / kComparison, csv);

    table << std::left << std::setw(10) << "method" << std::right << std::setw(10) << "sampling"
          << std::setw(12) << "rmse_rad" << std::setw(12) << "coherence" << std::setw(10)
          << "residues" << "\n";
    for (const MetricsRow& row : rows) {
        table << std::left << std::setw(10) << row.method << std::right << std::setw(10)
              << num(row.sampling_fraction) << std::setw(12) << std::fixed << std::setprecision(4)
              << row.metrics.rmse_rad << std::setw(12) << row.metrics.mean_coherence
              << std::defaultfloat << std::setw(10) << row.metrics.residue_count << "\n";
    }
    return rows;
}

}  // namespace insar::commands
