#include "insar/bp_imaging.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "insar/error.hpp"
#include "insar/fft.hpp"

namespace insar {

namespace {

// Bins [0, half) hold non-negative frequencies, [half, n) negative ones.
std::size_t positive_half(std::size_t n) { return (n + 1) / 2; }

void check_upsample_factor(std::size_t factor) {
    if (factor == 0 || !std::has_single_bit(factor)) {
        throw ConfigError("upsample factor must be a power of two, got " + std::to_string(factor));
    }
}

}  // namespace

bool in_band(const AcquisitionGeometry& geom, std::size_t n, std::size_t k) {
    const double signed_bin = k < positive_half(n) ? static_cast<double>(k)
                                                   : static_cast<double>(k) - static_cast<double>(n);
    const double f = signed_bin * geom.sample_rate / static_cast<double>(n);
    return std::abs(f) <= 0.5 * geom.bandwidth * (1.0 + 1e-12);
}

ComplexGrid range_compress(const ComplexGrid& echo, const AcquisitionGeometry& geom) {
    if (echo.rows() != geom.pulse_count || echo.cols() != geom.range_sample_count) {
        throw ShapeError("echo shape does not match the acquisition geometry");
    }
    const std::size_t m = echo.cols();
    std::vector<double> window(m);
    for (std::size_t k = 0; k < m; ++k) window[k] = in_band(geom, m, k) ? 1.0 : 0.0;

    ComplexGrid out = echo;
#pragma omp parallel for schedule(static)
    for (std::size_t n = 0; n < out.rows(); ++n) {
        std::span<cdouble> row = out.row(n);
        fft::transform(row, fft::Direction::Forward);
        for (std::size_t k = 0; k < m; ++k) row[k] *= window[k];
    }
    return out;
}

ComplexGrid range_compress(const EchoMatrix& echo, const AcquisitionGeometry& geom) {
    return range_compress(echo.data, geom);
}

RangeCompressed interpolate_range(const ComplexGrid& spectrum, std::size_t upsample_factor) {
    check_upsample_factor(upsample_factor);
    const std::size_t m = spectrum.cols();
    const std::size_t len = upsample_factor * m;
    const std::size_t half = positive_half(m);
    const double scale = 1.0 / static_cast<double>(m);

    RangeCompressed rc{ComplexGrid(spectrum.rows(), len), upsample_factor};
#pragma omp parallel for schedule(static)
    for (std::size_t n = 0; n < spectrum.rows(); ++n) {
        std::span<const cdouble> in = spectrum.row(n);
        std::span<cdouble> out = rc.data.row(n);
        std::copy(in.begin(), in.begin() + static_cast<std::ptrdiff_t>(half), out.begin());
        std::copy(in.begin() + static_cast<std::ptrdiff_t>(half), in.end(),
                  out.end() - static_cast<std::ptrdiff_t>(m - half));
        fft::transform(out, fft::Direction::Backward);
        for (cdouble& v : out) v *= scale;
    }
    return rc;
}

std::optional<std::size_t> range_bin_index(const AcquisitionGeometry& geom,
                                           std::size_t upsample_factor, double range) {
    if (!(range >= geom.reference_range)) return std::nullopt;
    const double pos = 2.0 * static_cast<double>(upsample_factor) * geom.sample_rate *
                       (range - geom.reference_range) / kSpeedOfLight;
    const double idx = std::floor(pos);
    const double len = static_cast<double>(upsample_factor * geom.range_sample_count);
    if (idx >= len) return std::nullopt;
    return static_cast<std::size_t>(idx);
}

BackprojectionPlan::BackprojectionPlan(const AcquisitionGeometry& geom, AntennaId antenna,
                                       std::size_t upsample_factor, const ImagingGrid& grid)
    : pulses_(geom.pulse_count),
      pixels_(grid.rows * grid.cols),
      upsample_factor_(upsample_factor),
      upsampled_length_(upsample_factor * geom.range_sample_count),
      grid_(grid),
      antenna_(antenna) {
    geom.validate();
    check_upsample_factor(upsample_factor);
    bins_.resize(pulses_ * pixels_);
    phasors_.resize(pulses_ * pixels_);
    const double k = 4.0 * kPi / geom.wavelength();
    std::size_t missed = 0;
#pragma omp parallel for schedule(static) reduction(+ : missed)
    for (std::size_t n = 0; n < pulses_; ++n) {
        const Vec3 phase_center = antenna_position(geom, antenna, n);
        for (std::size_t i = 0; i < pixels_; ++i) {
            const double range = distance(phase_center, grid.node(i / grid.cols, i % grid.cols));
            const auto bin = range_bin_index(geom, upsample_factor, range);
            const std::size_t at = n * pixels_ + i;
            if (bin) {
                bins_[at] = static_cast<std::int32_t>(*bin);
                phasors_[at] = std::polar(1.0, k * range);
            } else {
                bins_[at] = -1;
                phasors_[at] = {0.0, 0.0};
                ++missed;
            }
        }
    }
    out_of_swath_ = missed;
}

ComplexImage backproject(const RangeCompressed& rc, const BackprojectionPlan& plan) {
    if (rc.data.rows() != plan.pulses() || rc.data.cols() != plan.upsampled_length() ||
        rc.upsample_factor != plan.upsample_factor()) {
        throw ShapeError("range-compressed data does not match the back-projection plan");
    }
    const ImagingGrid& grid = plan.grid();
    ComplexImage image{ComplexGrid(grid.rows, grid.cols), grid};
    const double norm = 1.0 / static_cast<double>(plan.pulses());
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < plan.pixels(); ++i) {
        cdouble acc{0.0, 0.0};
        for (std::size_t n = 0; n < plan.pulses(); ++n) {
            const std::int32_t bin = plan.bin(n, i);
            if (bin < 0) continue;
            acc += rc.data(n, static_cast<std::size_t>(bin)) * plan.compensation(n, i);
        }
        image.data[i] = acc * norm;
    }
    return image;
}

ComplexImage backproject(const RangeCompressed& rc, const AcquisitionGeometry& geom,
                         AntennaId antenna, const ImagingGrid& grid) {
    return backproject(rc, BackprojectionPlan(geom, antenna, rc.upsample_factor, grid));
}

ComplexImage bp_image(const ComplexGrid& echo, const AcquisitionGeometry& geom,
                      const BackprojectionPlan& plan) {
    return backproject(interpolate_range(range_compress(echo, geom), plan.upsample_factor()),
                       plan);
}

ComplexImage bp_image(const EchoMatrix& echo, const AcquisitionGeometry& geom, AntennaId antenna,
                      std::size_t upsample_factor, const ImagingGrid& grid) {
    return bp_image(echo.data, geom, BackprojectionPlan(geom, antenna, upsample_factor, grid));
}

RangeCompressed backproject_adjoint(const ComplexGrid& image, const BackprojectionPlan& plan) {
    if (image.size() != plan.pixels()) {
        throw ShapeError("image does not match the back-projection plan grid");
    }
    RangeCompressed rc{ComplexGrid(plan.pulses(), plan.upsampled_length()),
                       plan.upsample_factor()};
    const double norm = 1.0 / static_cast<double>(plan.pulses());
#pragma omp parallel for schedule(static)
    for (std::size_t n = 0; n < plan.pulses(); ++n) {
        std::span<cdouble> row = rc.data.row(n);
        for (std::size_t i = 0; i < plan.pixels(); ++i) {
            const std::int32_t bin = plan.bin(n, i);
            if (bin < 0) continue;
            row[static_cast<std::size_t>(bin)] += image[i] * std::conj(plan.compensation(n, i)) * norm;
        }
    }
    return rc;
}

ComplexGrid interpolate_range_adjoint(const RangeCompressed& rc, std::size_t range_samples) {
    const std::size_t m = range_samples;
    if (rc.data.cols() != rc.upsample_factor * m) {
        throw ShapeError("upsampled length does not match the range sample count");
    }
    const std::size_t half = positive_half(m);
    const double scale = 1.0 / static_cast<double>(m);
    ComplexGrid spectrum(rc.data.rows(), m);
#pragma omp parallel for schedule(static)
    for (std::size_t n = 0; n < rc.data.rows(); ++n) {
        std::vector<cdouble> buf(rc.data.row(n).begin(), rc.data.row(n).end());
        fft::transform(buf, fft::Direction::Forward);
        std::span<cdouble> out = spectrum.row(n);
        for (std::size_t k = 0; k < half; ++k) out[k] = buf[k] * scale;
        for (std::size_t k = half; k < m; ++k) out[k] = buf[buf.size() - m + k] * scale;
    }
    return spectrum;
}

ComplexGrid range_compress_adjoint(const ComplexGrid& spectrum, const AcquisitionGeometry& geom) {
    const std::size_t m = spectrum.cols();
    std::vector<double> window(m);
    for (std::size_t k = 0; k < m; ++k) window[k] = in_band(geom, m, k) ? 1.0 : 0.0;
    ComplexGrid echo = spectrum;
#pragma omp parallel for schedule(static)
    for (std::size_t n = 0; n < echo.rows(); ++n) {
        std::span<cdouble> row = echo.row(n);
        for (std::size_t k = 0; k < m; ++k) row[k] *= window[k];
        fft::transform(row, fft::Direction::Backward);
    }
    return echo;
}

ComplexGrid bp_adjoint(const ComplexGrid& image, const AcquisitionGeometry& geom,
                       const BackprojectionPlan& plan) {
    return range_compress_adjoint(
        interpolate_range_adjoint(backproject_adjoint(image, plan), geom.range_sample_count),
        geom);
}

ComplexImage form_interferogram(const ComplexImage& master, const ComplexImage& slave) {
    require_same_shape(master.data, slave.data, "form_interferogram");
    ComplexImage out{ComplexGrid(master.data.rows(), master.data.cols()), master.grid};
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] = master.data[i] * std::conj(slave.data[i]);
    }
    return out;
}

}  // namespace insar
