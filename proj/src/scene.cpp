#include "insar/scene.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "insar/error.hpp"

namespace insar {

namespace {

// Uniform on (-pi, pi] from raw 64-bit engine output.
double uniform_phase(std::mt19937_64& rng) {
    const double u = static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    return kPi * (2.0 * u - 1.0);
}

SceneModel empty_scene(const ImagingGrid& grid) {
    if (grid.rows == 0 || grid.cols == 0) throw ConfigError("scene grid must be non-empty");
    if (!(grid.spacing > 0.0)) throw ConfigError("scene pixel spacing must be positive");
    SceneModel scene;
    scene.grid = grid;
    scene.reflectivity = RealGrid(grid.rows, grid.cols, 0.0);
    scene.speckle_phase = RealGrid(grid.rows, grid.cols, 0.0);
    scene.height = RealGrid(grid.rows, grid.cols, 0.0);
    return scene;
}

void fill_speckle(SceneModel& scene, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (double& phi : scene.speckle_phase.values()) phi = uniform_phase(rng);
}

}  // namespace

void SceneModel::validate() const {
    const std::size_t rows = grid.rows;
    const std::size_t cols = grid.cols;
    for (const RealGrid* g : {&reflectivity, &speckle_phase, &height}) {
        if (g->rows() != rows || g->cols() != cols) {
            throw ShapeError("scene arrays must match the grid shape");
        }
    }
    for (double v : reflectivity.values()) {
        if (!std::isfinite(v) || v < 0.0) {
            throw NumericalError("scene reflectivity must be finite and non-negative");
        }
    }
    for (double v : height.values()) {
        if (!std::isfinite(v)) throw NumericalError("scene height must be finite");
    }
    for (double v : speckle_phase.values()) {
        if (!std::isfinite(v)) throw NumericalError("scene speckle phase must be finite");
    }
}

SceneModel make_cone_scene(const ImagingGrid& grid, double max_height, std::uint64_t seed,
                           double radius) {
    if (!(max_height >= 0.0)) throw ConfigError("cone max_height must be >= 0");
    if (radius < 0.0) throw ConfigError("cone radius must be >= 0");
    SceneModel scene = empty_scene(grid);
    if (radius == 0.0) {
        radius = 0.5 * static_cast<double>(std::min(grid.rows, grid.cols)) * grid.spacing;
    }
    const double r0 = static_cast<double>(grid.rows / 2);
    const double c0 = static_cast<double>(grid.cols / 2);
    for (std::size_t r = 0; r < grid.rows; ++r) {
        for (std::size_t c = 0; c < grid.cols; ++c) {
            const double dr = (static_cast<double>(r) - r0) * grid.spacing;
            const double dc = (static_cast<double>(c) - c0) * grid.spacing;
            const double rho = std::hypot(dr, dc);
            scene.height(r, c) = max_height * std::max(0.0, 1.0 - rho / radius);
        }
    }
    std::fill(scene.reflectivity.values().begin(), scene.reflectivity.values().end(), 1.0);
    fill_speckle(scene, seed);
    return scene;
}

SceneModel make_cone_scene(std::size_t rows, std::size_t cols, double pixel_spacing,
                           double max_height, std::uint64_t seed) {
    ImagingGrid grid;
    grid.rows = rows;
    grid.cols = cols;
    grid.spacing = pixel_spacing;
    return make_cone_scene(grid, max_height, seed);
}

SceneModel make_flat_scene(const ImagingGrid& grid, std::uint64_t seed) {
    return make_cone_scene(grid, 0.0, seed);
}

SceneModel make_point_scene(const ImagingGrid& grid, std::size_t row, std::size_t col,
                            double height) {
    if (row >= grid.rows || col >= grid.cols) throw IndexError("point scatterer outside grid");
    SceneModel scene = empty_scene(grid);
    scene.reflectivity(row, col) = 1.0;
    scene.height(row, col) = height;
    return scene;
}

Vec3 scatterer_position(const SceneModel& scene, const AcquisitionGeometry& geom,
                        std::size_t row, std::size_t col) {
    const Vec3 node = scene.grid.node(row, col);
    const double h = scene.height(row, col);
    if (h == 0.0) return node;
    const double dz0 = geom.altitude - node[2];
    const double rho2 = node[1] * node[1] + dz0 * dz0;
    const double dz = geom.altitude - (node[2] + h);
    const double y2 = rho2 - dz * dz;
    if (y2 < 0.0) {
        throw ConfigError("terrain height " + std::to_string(h) +
                          " m is not reachable at the node's master range");
    }
    const double y = std::copysign(std::sqrt(y2), node[1]);
    return {node[0], y, node[2] + h};
}

RealGrid unwrapped_topographic_phase(const SceneModel& scene, const AcquisitionGeometry& geom) {
    const Vec3 master = mid_aperture_position(geom, AntennaId::Master);
    const Vec3 slave = mid_aperture_position(geom, AntennaId::Slave);
    const double k = 4.0 * kPi / geom.wavelength();
    RealGrid phase(scene.grid.rows, scene.grid.cols, 0.0);
    for (std::size_t r = 0; r < scene.grid.rows; ++r) {
        for (std::size_t c = 0; c < scene.grid.cols; ++c) {
            if (scene.height(r, c) == 0.0) continue;
            const Vec3 ref = scene.grid.node(r, c);
            const Vec3 top = scatterer_position(scene, geom, r, c);
            const double dm = distance(master, top) - distance(master, ref);
            const double ds = distance(slave, top) - distance(slave, ref);
            phase(r, c) = k * (ds - dm);
        }
    }
    return phase;
}

IdealInterferogram ideal_interferogram(const SceneModel& scene, const AcquisitionGeometry& geom) {
    IdealInterferogram out{unwrapped_topographic_phase(scene, geom)};
    for (double& phi : out.phase.values()) phi = wrap_phase(phi);
    return out;
}

}  // namespace insar
