#pragma once

#include <cstdint>
#include <vector>

#include "insar/bp_imaging.hpp"
#include "insar/echo_sim.hpp"
#include "insar/geometry.hpp"

namespace insar {

enum class SparsityTransform { Fourier2D };

/// Back-projection-embedded observation of a Fourier-domain interferogram:
///
///   A F theta_f = g( BP_m^H( X_s * IDFT2(theta_f) ) )
///
/// where BP_m^H is the exact adjoint of the master back-projection chain,
/// X_s is a frozen slave BP image and g is the pulse mask. Both 2D DFTs are
/// unitary.
class ObservationOperator {
public:
    ObservationOperator(AcquisitionGeometry geom, ComplexImage slave_image, SamplingMask mask,
                        std::size_t upsample_factor,
                        SparsityTransform transform = SparsityTransform::Fourier2D);

    const AcquisitionGeometry& geometry() const { return geom_; }
    const ComplexImage& slave_image() const { return slave_; }
    const SamplingMask& mask() const { return mask_; }
    const ImagingGrid& grid() const { return slave_.grid; }
    std::size_t upsample_factor() const { return plan_.upsample_factor(); }
    const BackprojectionPlan& plan() const { return plan_; }
    SparsityTransform transform() const { return transform_; }

    /// X_s * IDFT2(theta_f).
    ComplexImage synthesize_scene(const ComplexGrid& theta_f) const;
    /// Masked adjoint of the master BP chain applied to an image-domain scene.
    EchoMatrix generate_echo(const ComplexGrid& scene) const;
    EchoMatrix apply_forward(const ComplexGrid& theta_f) const;
    /// DFT2( conj(X_s) * BP_m( g(residual) ) ).
    ComplexGrid apply_adjoint(const ComplexGrid& residual) const;

private:
    AcquisitionGeometry geom_;
    ComplexImage slave_;
    SamplingMask mask_;
    SparsityTransform transform_;
    BackprojectionPlan plan_;
};

struct PowerIterationResult {
    double norm = 0.0;
    /// Singular-value estimate after each iteration.
    std::vector<double> history;
};

/// Power iteration on A^H A from a seeded random unit vector; returns the
/// largest singular value estimate of A F.
PowerIterationResult operator_norm_history(const ObservationOperator& op, std::size_t iterations,
                                           std::uint64_t seed = 1);
double operator_norm(const ObservationOperator& op, std::size_t iterations,
                     std::uint64_t seed = 1);

}  // namespace insar
