#pragma once

#include <cstdint>
#include <vector>

#include "insar/geometry.hpp"
#include "insar/grid.hpp"
#include "insar/scene.hpp"

namespace insar {

/// Raw baseband echoes, one row per pulse and one column per range sample.
struct EchoMatrix {
    ComplexGrid data;
    AntennaId antenna = AntennaId::Master;
};

/// Per-pulse keep/drop pattern. Dropped pulses are zero-filled, never removed.
struct SamplingMask {
    std::vector<std::uint8_t> kept_pulses;
    double fraction = 1.0;
    std::uint64_t seed = 0;

    std::size_t kept_count() const;
    bool is_full() const { return kept_count() == kept_pulses.size(); }
};

SamplingMask full_mask(std::size_t pulse_count);

/// Keeps exactly floor(fraction * pulse_count) pulses (at least one), chosen
/// uniformly at random from `seed`.
SamplingMask random_pulse_mask(std::size_t pulse_count, double fraction, std::uint64_t seed);

struct EchoOptions {
    /// Scatterers are only echoed while their squint from the antenna is within
    /// this angle (radians). Zero keeps every scatterer visible at every pulse.
    double beam_half_angle = 0.0;
};

/// Point-scatterer echo with a band-limited sinc range response:
///   y[n, m] = sum_i x_i sinc(B (tau_m - tau_i(n))) exp(-j 4 pi R_i(n) / lambda)
/// with tau_m = 2 R0 / c + m / Fs, tau_i(n) = 2 R_i(n) / c, plus circular complex
/// Gaussian noise of standard deviation `noise_sigma` per sample.
EchoMatrix simulate_echo(const SceneModel& scene, const AcquisitionGeometry& geom,
                         AntennaId antenna, double noise_sigma, std::uint64_t seed,
                         const EchoOptions& options = {});

/// Zeroes the dropped pulses.
EchoMatrix apply_mask(const EchoMatrix& echo, const SamplingMask& mask);
void apply_mask_inplace(ComplexGrid& echo, const SamplingMask& mask);

}  // namespace insar
