#include "insar/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "insar/error.hpp"

namespace insar {

RegionMask border_region(std::size_t rows, std::size_t cols, std::size_t width) {
    RegionMask region(rows, cols, 0);
    for (std::size_t r = width; r + width < rows; ++r) {
        for (std::size_t c = width; c + width < cols; ++c) region(r, c) = 1;
    }
    return region;
}

RealGrid wrapped_phase(const ComplexGrid& image) {
    RealGrid phase(image.rows(), image.cols());
    for (std::size_t i = 0; i < image.size(); ++i) phase[i] = wrap_phase(std::arg(image[i]));
    return phase;
}

double phase_rmse(const ComplexGrid& estimate, const RealGrid& truth, const RegionMask* region) {
    require_same_shape(estimate, truth, "phase_rmse");
    if (region) require_same_shape(estimate, *region, "phase_rmse region");
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < estimate.size(); ++i) {
        if (region && !(*region)[i]) continue;
        const double d = wrap_phase(std::arg(estimate[i]) - truth[i]);
        acc += d * d;
        ++count;
    }
    if (count == 0) throw ConfigError("phase_rmse: evaluation region is empty");
    return std::sqrt(acc / static_cast<double>(count));
}

double mean_coherence(const ComplexGrid& estimate, const RealGrid& truth, std::size_t window) {
    require_same_shape(estimate, truth, "mean_coherence");
    if (window < 3 || window % 2 == 0) {
        throw ConfigError("coherence window must be odd and >= 3, got " + std::to_string(window));
    }
    const std::size_t rows = estimate.rows();
    const std::size_t cols = estimate.cols();
    if (window > rows || window > cols) {
        throw ConfigError("coherence window larger than the grid");
    }
    ComplexGrid phasor(rows, cols);
    for (std::size_t i = 0; i < estimate.size(); ++i) {
        phasor[i] = std::polar(1.0, std::arg(estimate[i]) - truth[i]);
    }
    const std::size_t half = window / 2;
    double acc = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t r0 = r >= half ? r - half : 0;
        const std::size_t r1 = std::min(rows - 1, r + half);
        for (std::size_t c = 0; c < cols; ++c) {
            const std::size_t c0 = c >= half ? c - half : 0;
            const std::size_t c1 = std::min(cols - 1, c + half);
            cdouble sum{0.0, 0.0};
            for (std::size_t rr = r0; rr <= r1; ++rr) {
                for (std::size_t cc = c0; cc <= c1; ++cc) sum += phasor(rr, cc);
            }
            acc += std::abs(sum) / static_cast<double>((r1 - r0 + 1) * (c1 - c0 + 1));
        }
    }
    return acc / static_cast<double>(rows * cols);
}

std::size_t count_residues(const RealGrid& phase) {
    if (phase.rows() < 2 || phase.cols() < 2) throw ConfigError("count_residues needs a 2x2 grid");
    std::size_t count = 0;
    for (std::size_t r = 0; r + 1 < phase.rows(); ++r) {
        for (std::size_t c = 0; c + 1 < phase.cols(); ++c) {
            const double a = phase(r, c);
            const double b = phase(r, c + 1);
            const double d = phase(r + 1, c + 1);
            const double e = phase(r + 1, c);
            const double loop = wrap_phase(b - a) + wrap_phase(d - b) + wrap_phase(e - d) +
                                wrap_phase(a - e);
            if (std::abs(loop) > kPi) ++count;
        }
    }
    return count;
}

PhaseMetrics evaluate_phase(const ComplexGrid& estimate, const RealGrid& truth,
                            std::size_t coherence_window, const RegionMask* region) {
    PhaseMetrics m;
    m.rmse_rad = phase_rmse(estimate, truth, region);
    m.mean_coherence = mean_coherence(estimate, truth, coherence_window);
    m.residue_count = count_residues(wrapped_phase(estimate));
    return m;
}

}  // namespace insar
