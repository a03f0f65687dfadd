#pragma once

#include <cmath>
#include <cstdint>

#include "insar/geometry.hpp"
#include "insar/grid.hpp"

namespace insar {

/// Wraps an angle into (-pi, pi].
inline double wrap_phase(double phi) {
    double r = std::remainder(phi, 2.0 * kPi);
    if (r <= -kPi) r += 2.0 * kPi;
    return r;
}

/// Synthetic ground scene: one point scatterer per grid node with complex
/// amplitude reflectivity * exp(j speckle_phase) and terrain height.
struct SceneModel {
    ImagingGrid grid;
    RealGrid reflectivity;
    RealGrid speckle_phase;
    RealGrid height;

    void validate() const;
    cdouble amplitude(std::size_t r, std::size_t c) const {
        return std::polar(reflectivity(r, c), speckle_phase(r, c));
    }
};

struct IdealInterferogram {
    RealGrid phase;
};

/// Cone peaking at `max_height` on node (rows/2, cols/2) and falling linearly
/// to zero at `radius` meters (0 selects the inscribed circle, min(rows, cols)
/// * spacing / 2). Unit reflectivity, i.i.d. uniform speckle from `seed`.
SceneModel make_cone_scene(const ImagingGrid& grid, double max_height, std::uint64_t seed,
                           double radius = 0.0);
SceneModel make_cone_scene(std::size_t rows, std::size_t cols, double pixel_spacing,
                           double max_height, std::uint64_t seed);

SceneModel make_flat_scene(const ImagingGrid& grid, std::uint64_t seed);

/// Scene with a single unit scatterer at node (row, col); every other node is empty.
SceneModel make_point_scene(const ImagingGrid& grid, std::size_t row, std::size_t col,
                            double height = 0.0);

/// World position of the scatterer on node (row, col).
///
/// The zero-height node is rotated about the master flight axis up to its
/// terrain height, so the scatterer keeps the node's master range history
/// and along-track position. Scene pixels are therefore laid out in radar
/// geometry: both BP images focus every scatterer on its own grid node.
Vec3 scatterer_position(const SceneModel& scene, const AcquisitionGeometry& geom,
                        std::size_t row, std::size_t col);

/// Topographic phase left after back-projecting both antennas onto the
/// zero-height grid and forming X_m * conj(X_s), evaluated with mid-aperture
/// ranges:  wrap(4 pi / lambda * ((Rs* - Rs0) - (Rm* - Rm0))).
IdealInterferogram ideal_interferogram(const SceneModel& scene, const AcquisitionGeometry& geom);

/// Same as ideal_interferogram without wrapping.
RealGrid unwrapped_topographic_phase(const SceneModel& scene, const AcquisitionGeometry& geom);

}  // namespace insar
