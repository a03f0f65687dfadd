#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace insar {

using Vec3 = std::array<double, 3>;

inline constexpr double kSpeedOfLight = 299'792'458.0;
inline constexpr double kPi = 3.14159265358979323846;

enum class AntennaId { Master, Slave };

std::string_view to_string(AntennaId antenna);

/// Two-antenna side-looking acquisition on a straight, constant-velocity track.
///
/// Coordinates: x along-track, y cross-track ground range, z up. The master
/// phase center flies along (v t, 0, altitude); the slave is rigidly offset by
/// (0, B cos(tilt), B sin(tilt)). Pulse n is transmitted at t = n / prf.
struct AcquisitionGeometry {
    double altitude = 3000.0;
    double velocity = 50.0;
    double baseline_length = 1.0;
    double baseline_tilt = 0.0;
    double incidence_angle = 35.0 * kPi / 180.0;
    double carrier_frequency = 35e9;
    double bandwidth = 400e6;
    double sample_rate = 500e6;
    double prf = 1000.0;
    std::size_t pulse_count = 128;
    std::size_t range_sample_count = 704;
    double reference_range = 3570.0;

    /// Throws ConfigError when an invariant is violated.
    void validate() const;

    double wavelength() const { return kSpeedOfLight / carrier_frequency; }
    /// Slant-range distance between consecutive range samples, c / (2 Fs).
    double range_sample_spacing() const { return kSpeedOfLight / (2.0 * sample_rate); }
    double pulse_spacing() const { return velocity / prf; }
    double mid_aperture_x() const;
};

Vec3 baseline_vector(const AcquisitionGeometry& geom);

/// Phase-center position of `antenna` at pulse `pulse_index`; throws IndexError
/// when pulse_index >= pulse_count.
Vec3 antenna_position(const AcquisitionGeometry& geom, AntennaId antenna,
                      std::size_t pulse_index);

/// Phase-center position when the master is at along-track coordinate x.
Vec3 antenna_position_at(const AcquisitionGeometry& geom, AntennaId antenna, double x);

Vec3 mid_aperture_position(const AcquisitionGeometry& geom, AntennaId antenna);

double distance(const Vec3& a, const Vec3& b);

double slant_range(const AcquisitionGeometry& geom, AntennaId antenna,
                   std::size_t pulse_index, const Vec3& target);

/// Regular zero-height ground grid. Row index runs along-track (x), column
/// index runs in ground range (y).
struct ImagingGrid {
    std::size_t rows = 64;
    std::size_t cols = 64;
    double spacing = 300.0 / 64.0;
    Vec3 origin{0.0, 0.0, 0.0};

    Vec3 node(std::size_t row, std::size_t col) const {
        return {origin[0] + static_cast<double>(row) * spacing,
                origin[1] + static_cast<double>(col) * spacing, origin[2]};
    }

    friend bool operator==(const ImagingGrid&, const ImagingGrid&) = default;
};

/// Grid centred on the mid-aperture along-track position and on the ground
/// range where the master look direction meets z = 0.
ImagingGrid centered_grid(const AcquisitionGeometry& geom, std::size_t rows, std::size_t cols,
                          double spacing);

/// Chooses reference_range and range_sample_count so that every grid node is
/// inside the sampled swath for both antennas at every pulse, with `margin`
/// meters to spare on each side. Other fields are left untouched.
AcquisitionGeometry fit_swath(AcquisitionGeometry geom, const ImagingGrid& grid,
                              double margin = 10.0);

}  // namespace insar
