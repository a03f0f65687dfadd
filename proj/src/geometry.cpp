#include "insar/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "insar/error.hpp"

namespace insar {

std::string_view to_string(AntennaId antenna) {
    return antenna == AntennaId::Master ? "master" : "slave";
}

void AcquisitionGeometry::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(std::isfinite(v) && v > 0.0)) {
            throw ConfigError(std::string("geometry.") + name + " must be positive and finite");
        }
    };
    positive(altitude, "altitude");
    positive(velocity, "velocity");
    positive(baseline_length, "baseline_length");
    positive(incidence_angle, "incidence_angle");
    positive(carrier_frequency, "carrier_frequency");
    positive(bandwidth, "bandwidth");
    positive(sample_rate, "sample_rate");
    positive(prf, "prf");
    positive(reference_range, "reference_range");
    if (!std::isfinite(baseline_tilt)) throw ConfigError("geometry.baseline_tilt must be finite");
    if (incidence_angle >= kPi / 2) throw ConfigError("geometry.incidence_angle must be < 90 deg");
    if (sample_rate < bandwidth) throw ConfigError("geometry.sample_rate must be >= bandwidth");
    if (pulse_count == 0) throw ConfigError("geometry.pulse_count must be > 0");
    if (range_sample_count == 0) throw ConfigError("geometry.range_sample_count must be > 0");
}

double AcquisitionGeometry::mid_aperture_x() const {
    return velocity * static_cast<double>(pulse_count - 1) / (2.0 * prf);
}

Vec3 baseline_vector(const AcquisitionGeometry& geom) {
    return {0.0, geom.baseline_length * std::cos(geom.baseline_tilt),
            geom.baseline_length * std::sin(geom.baseline_tilt)};
}

Vec3 antenna_position_at(const AcquisitionGeometry& geom, AntennaId antenna, double x) {
    Vec3 p{x, 0.0, geom.altitude};
    if (antenna == AntennaId::Slave) {
        const Vec3 b = baseline_vector(geom);
        p[1] += b[1];
        p[2] += b[2];
    }
    return p;
}

Vec3 antenna_position(const AcquisitionGeometry& geom, AntennaId antenna,
                      std::size_t pulse_index) {
    if (pulse_index >= geom.pulse_count) {
        throw IndexError("pulse index " + std::to_string(pulse_index) + " out of range (" +
                         std::to_string(geom.pulse_count) + " pulses)");
    }
    const double x = geom.velocity * static_cast<double>(pulse_index) / geom.prf;
    return antenna_position_at(geom, antenna, x);
}

Vec3 mid_aperture_position(const AcquisitionGeometry& geom, AntennaId antenna) {
    return antenna_position_at(geom, antenna, geom.mid_aperture_x());
}

double distance(const Vec3& a, const Vec3& b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    const double dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double slant_range(const AcquisitionGeometry& geom, AntennaId antenna,
                   std::size_t pulse_index, const Vec3& target) {
    return distance(antenna_position(geom, antenna, pulse_index), target);
}

ImagingGrid centered_grid(const AcquisitionGeometry& geom, std::size_t rows, std::size_t cols,
                          double spacing) {
    if (rows == 0 || cols == 0) throw ConfigError("grid must have rows > 0 and cols > 0");
    if (!(spacing > 0.0)) throw ConfigError("grid spacing must be positive");
    const double y_center = geom.altitude * std::tan(geom.incidence_angle);
    ImagingGrid grid;
    grid.rows = rows;
    grid.cols = cols;
    grid.spacing = spacing;
    grid.origin = {geom.mid_aperture_x() - 0.5 * static_cast<double>(rows - 1) * spacing,
                   y_center - 0.5 * static_cast<double>(cols - 1) * spacing, 0.0};
    return grid;
}

AcquisitionGeometry fit_swath(AcquisitionGeometry geom, const ImagingGrid& grid, double margin) {
    double r_min = std::numeric_limits<double>::max();
    double r_max = 0.0;
    // Extremes over the aperture: first pulse, last pulse, closest approach.
    const double x_first = 0.0;
    const double x_last = geom.velocity * static_cast<double>(geom.pulse_count - 1) / geom.prf;
    for (AntennaId antenna : {AntennaId::Master, AntennaId::Slave}) {
        for (std::size_t r = 0; r < grid.rows; ++r) {
            for (std::size_t c = 0; c < grid.cols; ++c) {
                const Vec3 p = grid.node(r, c);
                const double x_close = std::clamp(p[0], x_first, x_last);
                for (double x : {x_first, x_last, x_close}) {
                    const double d = distance(antenna_position_at(geom, antenna, x), p);
                    r_min = std::min(r_min, d);
                    r_max = std::max(r_max, d);
                }
            }
        }
    }
    geom.reference_range = std::max(r_min - margin, 1.0);
    const double span = (r_max + margin) - geom.reference_range;
    const auto samples = static_cast<std::size_t>(std::ceil(span / geom.range_sample_spacing()));
    geom.range_sample_count = (samples + 31) / 32 * 32;
    return geom;
}

}  // namespace insar
