#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "insar/echo_sim.hpp"
#include "insar/geometry.hpp"
#include "insar/grid.hpp"

namespace insar {

/// Complex image on an imaging grid.
struct ComplexImage {
    ComplexGrid data;
    ImagingGrid grid;
};

/// Range-compressed pulses after frequency-domain interpolation; each row
/// holds upsample_factor * range_sample_count samples.
struct RangeCompressed {
    ComplexGrid data;
    std::size_t upsample_factor = 1;
};

/// True when bin k of a length-n DFT lies inside the matched-filter band
/// |f| <= bandwidth / 2.
bool in_band(const AcquisitionGeometry& geom, std::size_t n, std::size_t k);

/// Per-pulse forward DFT along range multiplied by the band window H_R.
ComplexGrid range_compress(const EchoMatrix& echo, const AcquisitionGeometry& geom);
ComplexGrid range_compress(const ComplexGrid& echo, const AcquisitionGeometry& geom);

/// Zero-pads each spectrum between its positive and negative halves to
/// upsample_factor * M bins, inverse transforms, and scales so that samples
/// at the original positions keep their values. upsample_factor must be a
/// power of two.
RangeCompressed interpolate_range(const ComplexGrid& spectrum, std::size_t upsample_factor);

/// floor(2 N Fs (R - R0) / c); nullopt when R < R0 or the bin lies past the
/// upsampled swath.
std::optional<std::size_t> range_bin_index(const AcquisitionGeometry& geom,
                                           std::size_t upsample_factor, double range);

/// Range bin and phase compensation exp(+j 4 pi R / lambda) of every
/// (pulse, pixel) pair for one antenna, shared by back-projection and its
/// adjoint. Pixels sit on the zero-height grid.
class BackprojectionPlan {
public:
    BackprojectionPlan(const AcquisitionGeometry& geom, AntennaId antenna,
                       std::size_t upsample_factor, const ImagingGrid& grid);

    std::size_t pulses() const { return pulses_; }
    std::size_t pixels() const { return pixels_; }
    std::size_t upsampled_length() const { return upsampled_length_; }
    std::size_t upsample_factor() const { return upsample_factor_; }
    const ImagingGrid& grid() const { return grid_; }
    AntennaId antenna() const { return antenna_; }
    /// Number of (pulse, pixel) pairs outside the sampled swath.
    std::size_t out_of_swath() const { return out_of_swath_; }

    /// Bin index for (pulse, pixel), -1 when out of swath.
    std::int32_t bin(std::size_t pulse, std::size_t pixel) const {
        return bins_[pulse * pixels_ + pixel];
    }
    const cdouble& compensation(std::size_t pulse, std::size_t pixel) const {
        return phasors_[pulse * pixels_ + pixel];
    }

private:
    std::size_t pulses_;
    std::size_t pixels_;
    std::size_t upsample_factor_;
    std::size_t upsampled_length_;
    ImagingGrid grid_;
    AntennaId antenna_;
    std::size_t out_of_swath_ = 0;
    std::vector<std::int32_t> bins_;
    std::vector<cdouble> phasors_;
};

/// image[i] = (1 / P) sum_n rc[n, bin(n, i)] exp(+j 4 pi R_i(n) / lambda)
ComplexImage backproject(const RangeCompressed& rc, const BackprojectionPlan& plan);
ComplexImage backproject(const RangeCompressed& rc, const AcquisitionGeometry& geom,
                         AntennaId antenna, const ImagingGrid& grid);

/// range_compress -> interpolate_range -> backproject.
ComplexImage bp_image(const EchoMatrix& echo, const AcquisitionGeometry& geom, AntennaId antenna,
                      std::size_t upsample_factor, const ImagingGrid& grid);
ComplexImage bp_image(const ComplexGrid& echo, const AcquisitionGeometry& geom,
                      const BackprojectionPlan& plan);

/// Adjoints of the three BP stages, in reverse order of application.
RangeCompressed backproject_adjoint(const ComplexGrid& image, const BackprojectionPlan& plan);
ComplexGrid interpolate_range_adjoint(const RangeCompressed& rc, std::size_t range_samples);
ComplexGrid range_compress_adjoint(const ComplexGrid& spectrum, const AcquisitionGeometry& geom);

/// Exact adjoint of bp_image's linear map echo -> image.
ComplexGrid bp_adjoint(const ComplexGrid& image, const AcquisitionGeometry& geom,
                       const BackprojectionPlan& plan);

/// X_m * conj(X_s), elementwise.
ComplexImage form_interferogram(const ComplexImage& master, const ComplexImage& slave);

}  // namespace insar
