#pragma once

#include <cstddef>
#include <cstdint>

#include "insar/bp_imaging.hpp"
#include "insar/grid.hpp"
#include "insar/scene.hpp"

namespace insar {

struct PhaseMetrics {
    double rmse_rad = 0.0;
    double mean_coherence = 0.0;
    std::size_t residue_count = 0;
};

/// Nonzero entries mark the pixels that take part in an evaluation.
using RegionMask = Grid<std::uint8_t>;

/// Region that excludes a border of `width` pixels on every side.
RegionMask border_region(std::size_t rows, std::size_t cols, std::size_t width);

/// sqrt(mean(wrap(arg(estimate) - truth)^2)) over the region.
double phase_rmse(const ComplexGrid& estimate, const RealGrid& truth,
                  const RegionMask* region = nullptr);

/// Mean over pixels of |window average of exp(j (arg(estimate) - truth))|.
/// Windows are clipped at the grid border. `window` must be odd and >= 3.
double mean_coherence(const ComplexGrid& estimate, const RealGrid& truth, std::size_t window);

/// 2x2 loops whose wrapped phase differences sum to +-2 pi.
std::size_t count_residues(const RealGrid& phase);

RealGrid wrapped_phase(const ComplexGrid& image);

PhaseMetrics evaluate_phase(const ComplexGrid& estimate, const RealGrid& truth,
                            std::size_t coherence_window = 5, const RegionMask* region = nullptr);

}  // namespace insar
