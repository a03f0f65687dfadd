#include "insar/forward_model.hpp"

#include <cmath>
#include <random>
#include <string>

#include "insar/error.hpp"
#include "insar/fft.hpp"

namespace insar {

ObservationOperator::ObservationOperator(AcquisitionGeometry geom, ComplexImage slave_image,
                                         SamplingMask mask, std::size_t upsample_factor,
                                         SparsityTransform transform)
    : geom_(geom),
      slave_(std::move(slave_image)),
      mask_(std::move(mask)),
      transform_(transform),
      plan_(geom_, AntennaId::Master, upsample_factor, slave_.grid) {
    if (slave_.data.rows() != slave_.grid.rows || slave_.data.cols() != slave_.grid.cols) {
        throw ShapeError("slave image does not match its grid metadata");
    }
    if (mask_.kept_pulses.size() != geom_.pulse_count) {
        throw ShapeError("sampling mask length does not match pulse_count");
    }
    double energy = 0.0;
    for (const cdouble& v : slave_.data.values()) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw NumericalError("slave image contains non-finite values");
        }
        energy += std::norm(v);
    }
    if (!(energy > 0.0)) throw NumericalError("slave image is identically zero");
}

ComplexImage ObservationOperator::synthesize_scene(const ComplexGrid& theta_f) const {
    require_same_shape(theta_f, slave_.data, "synthesize_scene");
    ComplexImage scene{theta_f, slave_.grid};
    fft::unitary2d(scene.data, fft::Direction::Backward);
    for (std::size_t i = 0; i < scene.data.size(); ++i) scene.data[i] *= slave_.data[i];
    return scene;
}

EchoMatrix ObservationOperator::generate_echo(const ComplexGrid& scene) const {
    require_same_shape(scene, slave_.data, "generate_echo");
    EchoMatrix echo{bp_adjoint(scene, geom_, plan_), AntennaId::Master};
    apply_mask_inplace(echo.data, mask_);
    return echo;
}

EchoMatrix ObservationOperator::apply_forward(const ComplexGrid& theta_f) const {
    return generate_echo(synthesize_scene(theta_f).data);
}

ComplexGrid ObservationOperator::apply_adjoint(const ComplexGrid& residual) const {
    if (residual.rows() != geom_.pulse_count || residual.cols() != geom_.range_sample_count) {
        throw ShapeError("residual is not echo-shaped");
    }
    ComplexGrid masked = residual;
    apply_mask_inplace(masked, mask_);
    ComplexGrid out = bp_image(masked, geom_, plan_).data;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= std::conj(slave_.data[i]);
    fft::unitary2d(out, fft::Direction::Forward);
    return out;
}

PowerIterationResult operator_norm_history(const ObservationOperator& op, std::size_t iterations,
                                           std::uint64_t seed) {
    if (iterations < 1) throw ConfigError("power iteration needs at least one iteration");
    const ImagingGrid& grid = op.grid();
    ComplexGrid v(grid.rows, grid.cols);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    for (cdouble& x : v.values()) x = {normal(rng), normal(rng)};

    PowerIterationResult result;
    double nv = norm2(v.values());
    for (std::size_t it = 0; it < iterations; ++it) {
        for (cdouble& x : v.values()) x /= nv;
        ComplexGrid w = op.apply_adjoint(op.apply_forward(v).data);
        const double nw = norm2(w.values());
        // |A^H A v| for unit v converges to sigma_max^2 from below.
        result.norm = std::sqrt(nw);
        result.history.push_back(result.norm);
        if (nw == 0.0) break;
        v = std::move(w);
        nv = nw;
    }
    return result;
}

double operator_norm(const ObservationOperator& op, std::size_t iterations, std::uint64_t seed) {
    if (iterations < 10) throw ConfigError("operator_norm needs at least 10 power iterations");
    return operator_norm_history(op, iterations, seed).norm;
}

}  // namespace insar
