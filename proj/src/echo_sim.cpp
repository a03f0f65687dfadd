#include "insar/echo_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "insar/error.hpp"

namespace insar {

namespace {

// Unbiased draw from [0, n) using raw engine output.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

struct Scatterer {
    Vec3 position;
    cdouble amplitude;
};

}  // namespace

std::size_t SamplingMask::kept_count() const {
    return static_cast<std::size_t>(std::count(kept_pulses.begin(), kept_pulses.end(), 1));
}

SamplingMask full_mask(std::size_t pulse_count) {
    SamplingMask mask;
    mask.kept_pulses.assign(pulse_count, 1);
    mask.fraction = 1.0;
    return mask;
}

SamplingMask random_pulse_mask(std::size_t pulse_count, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw ConfigError("sampling fraction must be in (0, 1], got " + std::to_string(fraction));
    }
    if (pulse_count == 0) throw ConfigError("sampling mask needs at least one pulse");
    const auto keep = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(pulse_count))));

    std::vector<std::size_t> order(pulse_count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < keep; ++i) {
        const std::size_t j = i + bounded(rng, pulse_count - i);
        std::swap(order[i], order[j]);
    }

    SamplingMask mask;
    mask.kept_pulses.assign(pulse_count, 0);
    for (std::size_t i = 0; i < keep; ++i) mask.kept_pulses[order[i]] = 1;
    mask.fraction = fraction;
    mask.seed = seed;
    return mask;
}

EchoMatrix simulate_echo(const SceneModel& scene, const AcquisitionGeometry& geom,
                         AntennaId antenna, double noise_sigma, std::uint64_t seed,
                         const EchoOptions& options) {
    geom.validate();
    scene.validate();
    if (!(noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be >= 0");

    std::vector<Scatterer> scatterers;
    for (std::size_t r = 0; r < scene.grid.rows; ++r) {
        for (std::size_t c = 0; c < scene.grid.cols; ++c) {
            if (scene.reflectivity(r, c) == 0.0) continue;
            scatterers.push_back({scatterer_position(scene, geom, r, c), scene.amplitude(r, c)});
        }
    }

    const std::size_t pulses = geom.pulse_count;
    const std::size_t samples = geom.range_sample_count;
    const double k = 4.0 * kPi / geom.wavelength();
    const double step = geom.bandwidth / geom.sample_rate;  // sinc argument per sample

    // sin(pi (u0 + m step)) = sin(pi u0) cos(pi m step) + cos(pi u0) sin(pi m step)
    std::vector<double> cos_table(samples);
    std::vector<double> sin_table(samples);
    for (std::size_t m = 0; m < samples; ++m) {
        const double a = kPi * step * static_cast<double>(m);
        cos_table[m] = std::cos(a);
        sin_table[m] = std::sin(a);
    }

    const double tan_beam = options.beam_half_angle > 0.0 ? std::tan(options.beam_half_angle) : 0.0;

    EchoMatrix echo{ComplexGrid(pulses, samples), antenna};
#pragma omp parallel for schedule(static)
    for (std::size_t n = 0; n < pulses; ++n) {
        const Vec3 phase_center = antenna_position(geom, antenna, n);
        std::span<cdouble> row = echo.data.row(n);
        for (const Scatterer& s : scatterers) {
            const double range = distance(phase_center, s.position);
            if (tan_beam > 0.0) {
                const double along = std::abs(s.position[0] - phase_center[0]);
                const double cross = std::hypot(s.position[1] - phase_center[1],
                                                s.position[2] - phase_center[2]);
                if (along > cross * tan_beam) continue;
            }
            const cdouble a = s.amplitude * std::polar(1.0, -k * range);
            const double u0 = geom.bandwidth * 2.0 * (geom.reference_range - range) / kSpeedOfLight;
            const double s0 = std::sin(kPi * u0);
            const double c0 = std::cos(kPi * u0);
            for (std::size_t m = 0; m < samples; ++m) {
                const double u = u0 + step * static_cast<double>(m);
                const double pu = kPi * u;
                const double sinc =
                    std::abs(pu) < 1e-12 ? 1.0 : (s0 * cos_table[m] + c0 * sin_table[m]) / pu;
                row[m] += a * sinc;
            }
        }
    }

    if (noise_sigma > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, noise_sigma / std::sqrt(2.0));
        for (cdouble& v : echo.data.values()) {
            const double re = normal(rng);
            const double im = normal(rng);
            v += cdouble(re, im);
        }
    }
    return echo;
}

void apply_mask_inplace(ComplexGrid& echo, const SamplingMask& mask) {
    if (mask.kept_pulses.size() != echo.rows()) {
        throw ShapeError("sampling mask has " + std::to_string(mask.kept_pulses.size()) +
                         " pulses, echo has " + std::to_string(echo.rows()));
    }
    for (std::size_t n = 0; n < echo.rows(); ++n) {
        if (mask.kept_pulses[n]) continue;
        std::span<cdouble> row = echo.row(n);
        std::fill(row.begin(), row.end(), cdouble{0.0, 0.0});
    }
}

EchoMatrix apply_mask(const EchoMatrix& echo, const SamplingMask& mask) {
    EchoMatrix out = echo;
    apply_mask_inplace(out.data, mask);
    return out;
}

}  // namespace insar
