#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "insar/experiment.hpp"
#include "insar/metrics.hpp"

namespace insar::commands {

// File names written into the output directory.
inline constexpr const char* kManifest = "manifest.json";
inline constexpr const char* kEchoMaster = "echo_master.cf64";
inline constexpr const char* kEchoSlave = "echo_slave.cf64";
inline constexpr const char* kMask = "mask.f64";
inline constexpr const char* kHeight = "scene_height.f64";
inline constexpr const char* kReflectivity = "scene_reflectivity.f64";
inline constexpr const char* kSpeckle = "scene_speckle.f64";
inline constexpr const char* kIdealPhase = "ideal_phase.f64";
inline constexpr const char* kBpMaster = "bp_master.cf64";
inline constexpr const char* kBpSlave = "bp_slave.cf64";
inline constexpr const char* kBpInterferogram = "bp_interferogram.cf64";
inline constexpr const char* kProposedInterferogram = "proposed_interferogram.cf64";
inline constexpr const char* kProposedSpectrum = "proposed_spectrum.cf64";
inline constexpr const char* kSolveReport = "solve_report.csv";
inline constexpr const char* kMetricsBp = "metrics_bp.csv";
inline constexpr const char* kMetricsProposed = "metrics_proposed.csv";
inline constexpr const char* kComparison = "comparison.csv";

inline constexpr const char* kMetricsHeader =
    "method,sampling_fraction,rmse_rad,coherence,residues,seconds";

struct MetricsRow {
    std::string method;
    double sampling_fraction = 1.0;
    PhaseMetrics metrics;
    /// Negative when timing is not recorded.
    double seconds = -1.0;
};

std::string format_metrics_row(const MetricsRow& row);
std::string format_solve_report(const SolveReport& report, bool with_timing);

struct EchoPaths {
    std::filesystem::path master;
    std::filesystem::path slave;
};

/// Default echo locations inside `dir`.
EchoPaths default_echo_paths(const std::filesystem::path& dir);

/// Simulates the scene and both (masked) echoes; writes the scene grids,
/// ideal phase, mask, echoes and manifest.
void simulate(const Experiment& experiment, const std::filesystem::path& out);

/// Baseline BP images and interferogram, phase PNG and metrics row.
MetricsRow bp(const Experiment& experiment, const EchoPaths& echoes,
              const std::filesystem::path& out);

/// Sparse reconstruction, solve report, phase PNG and metrics row. The mask
/// is read from mask.f64 in `out` or next to the master echo, otherwise rebuilt
/// from the config. The ideal phase is looked up the same way.
/// Throws SolverDivergence after writing the partial report.
MetricsRow reconstruct(const Experiment& experiment, const EchoPaths& echoes,
                       const std::filesystem::path& out, std::ostream& log);

/// Recomputes metrics for each interferogram (files or run directories) against
/// the ideal phase stored next to it; writes comparison.csv into `out` and a
/// human-readable table to `table`.
std::vector<MetricsRow> evaluate(const Experiment& experiment,
                                 const std::vector<std::filesystem::path>& inputs,
                                 const std::filesystem::path& out, std::ostream& table);

}  // namespace insar::commands
