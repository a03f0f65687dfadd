#pragma once

#include <cmath>
#include <complex>
#include <random>

#include "insar/bp_imaging.hpp"
#include "insar/echo_sim.hpp"
#include "insar/geometry.hpp"
#include "insar/grid.hpp"
#include "insar/scene.hpp"

namespace support {

using insar::cdouble;

struct Setup {
    insar::AcquisitionGeometry geom;
    insar::ImagingGrid grid;
};

/// Default acquisition with `pulses` pulses, a centred grid and a swath fitted to it.
inline Setup small_setup(std::size_t rows, std::size_t cols, std::size_t pulses,
                         double spacing = 300.0 / 64.0) {
    Setup s;
    s.geom.pulse_count = pulses;
    s.grid = insar::centered_grid(s.geom, rows, cols, spacing);
    s.geom = insar::fit_swath(s.geom, s.grid);
    return s;
}

inline insar::ComplexGrid random_grid(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    insar::ComplexGrid g(rows, cols);
    for (auto& v : g.values()) v = {n(rng), n(rng)};
    return g;
}

inline double relative_gap(cdouble a, cdouble b, double scale) { return std::abs(a - b) / scale; }

inline double max_relative_diff(const insar::ComplexGrid& a, const insar::ComplexGrid& b) {
    double diff = 0.0;
    double ref = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff = std::max(diff, std::abs(a[i] - b[i]));
        ref = std::max(ref, std::abs(b[i]));
    }
    return ref == 0.0 ? diff : diff / ref;
}

/// Naive DFT, sign -1 forward and +1 backward, unnormalized.
inline std::vector<cdouble> naive_dft(const std::vector<cdouble>& x, int sign) {
    const std::size_t n = x.size();
    std::vector<cdouble> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cdouble acc{0.0, 0.0};
        for (std::size_t m = 0; m < n; ++m) {
            const double angle = sign * 2.0 * M_PI * static_cast<double>((k * m) % n) /
                                 static_cast<double>(n);
            acc += x[m] * cdouble{std::cos(angle), std::sin(angle)};
        }
        out[k] = acc;
    }
    return out;
}

}  // namespace support
