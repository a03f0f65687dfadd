#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "insar/bp_imaging.hpp"
#include "insar/echo_sim.hpp"
#include "insar/error.hpp"
#include "insar/forward_model.hpp"

namespace insar {

enum class SolverInit { Zero, Bp };

struct SolverConfig {
    /// Explicit regularization weight; when unset, lambda = lambda_scale * max|A^H y|.
    std::optional<double> lambda;
    double lambda_scale = 0.01;
    /// Explicit gradient step; when unset, 0.99 / L^2 with L from power iteration.
    std::optional<double> step_mu;
    std::size_t max_iterations = 5;
    double tolerance = 1e-4;
    std::size_t norm_power_iterations = 30;
    SolverInit init = SolverInit::Zero;

    void validate() const;
};

struct SolveReport {
    std::vector<double> data_term;
    std::vector<double> penalty;
    std::vector<double> residual_norm;
    std::vector<double> seconds;
    double lambda = 0.0;
    double step_mu = 0.0;
    /// Zero when the step was given explicitly.
    double operator_norm = 0.0;
    /// Fraction of Fourier coefficients that are exactly zero after the last iteration.
    double sparsity = 0.0;
    bool converged = false;

    std::size_t iterations() const { return data_term.size(); }
};

struct SolveResult {
    /// Image-domain interferogram IDFT2(theta_f).
    ComplexImage theta;
    ComplexGrid theta_f;
    SolveReport report;
};

/// Raised when the objective stops being finite; carries the partial report.
class SolverDivergence : public NumericalError {
public:
    SolverDivergence(const std::string& what, SolveReport report)
        : NumericalError(what), report_(std::move(report)) {}
    const SolveReport& report() const { return report_; }

private:
    SolveReport report_;
};

/// Complex soft-thresholding: z * max(|z| - t, 0) / |z|.
std::vector<cdouble> soft_threshold(std::span<const cdouble> z, double threshold);
void soft_threshold_inplace(std::span<cdouble> z, double threshold);

/// (1/2 |y - A F theta_f|^2, lambda |theta_f|_1)
std::pair<double, double> objective(const ObservationOperator& op, const ComplexGrid& y,
                                    const ComplexGrid& theta_f, double lambda);

/// Forward-backward iteration
///   z = theta_f + mu A^H (y - A theta_f),  theta_f <- soft_threshold(z, mu lambda)
/// from theta_f = 0, or from `initial_theta_f` when given.
SolveResult solve(const ObservationOperator& op, const ComplexGrid& y, const SolverConfig& cfg,
                  const ComplexGrid* initial_theta_f = nullptr);

/// Spectrum of a BP interferogram rescaled to best explain y under A; used
/// as the starting point for SolverInit::Bp.
ComplexGrid bp_initial_guess(const ObservationOperator& op, const ComplexGrid& y,
                             const ComplexImage& bp_interferogram);

}  // namespace insar
