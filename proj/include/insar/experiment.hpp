#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "insar/bp_imaging.hpp"
#include "insar/echo_sim.hpp"
#include "insar/geometry.hpp"
#include "insar/scene.hpp"
#include "insar/solver.hpp"

namespace insar {

enum class SceneKind { Cone, Flat };

struct SceneConfig {
    SceneKind kind = SceneKind::Cone;
    std::size_t rows = 64;
    std::size_t cols = 64;
    double pixel_spacing = 300.0 / 64.0;
    double max_height = 40.0;
    /// Cone footprint radius in meters; 0 selects the inscribed circle.
    double radius = 0.0;
    std::uint64_t seed = 1;
};

struct SamplingConfig {
    double fraction = 1.0;
    std::uint64_t seed = 2;
};

struct NoiseConfig {
    double sigma = 0.0;
    std::uint64_t seed = 3;
};

struct ImagingConfig {
    std::size_t upsample_factor = 8;
    /// Pixels excluded on each side when computing RMSE.
    std::size_t metrics_border = 0;
    std::size_t coherence_window = 5;
};

/// Everything one experiment run needs. Values mirror the sections of the
/// text config file; reference_range / range_sample_count may be left to
/// `auto`, in which case resolve() fits the swath to the grid.
struct ExperimentConfig {
    AcquisitionGeometry geometry;
    bool auto_reference_range = true;
    bool auto_range_samples = true;
    SceneConfig scene;
    SamplingConfig sampling;
    NoiseConfig noise;
    ImagingConfig imaging;
    SolverConfig solver;
    std::filesystem::path output_directory = "out";
    /// Wall-clock seconds in metrics rows and solve reports; off keeps the
    /// outputs byte-reproducible.
    bool record_timing = false;

    /// Replaces the scene, sampling and noise seeds with base, base+1, base+2.
    void override_seed(std::uint64_t base);
};

/// Parses the sectioned `key = value` config format. Unknown sections or
/// keys, duplicates, and malformed values raise ConfigError naming
/// `source:line`.
ExperimentConfig parse_config(std::string_view text, std::string_view source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Config text with every key at its default value.
std::string default_config_text();

/// Config with derived quantities filled in and validated.
struct Experiment {
    ExperimentConfig config;
    AcquisitionGeometry geometry;
    ImagingGrid grid;
};

Experiment resolve(const ExperimentConfig& config);

/// All resolved parameters as pretty-printed JSON.
std::string manifest_json(const Experiment& experiment);

SceneModel build_scene(const Experiment& experiment);
SamplingMask build_mask(const Experiment& experiment);

struct Simulation {
    SceneModel scene;
    IdealInterferogram truth;
    SamplingMask mask;
    /// Masked echoes.
    EchoMatrix master;
    EchoMatrix slave;
};

Simulation simulate(const Experiment& experiment);

struct BpResult {
    ComplexImage master;
    ComplexImage slave;
    ComplexImage interferogram;
};

BpResult run_bp(const Experiment& experiment, const EchoMatrix& master, const EchoMatrix& slave);

/// Builds the observation operator from the slave BP image and solves for
/// the interferogram from the master echo.
SolveResult run_reconstruction(const Experiment& experiment, const EchoMatrix& master,
                               const EchoMatrix& slave, const SamplingMask& mask);

}  // namespace insar
