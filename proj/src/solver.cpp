#include "insar/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "insar/fft.hpp"

namespace insar {

namespace {

double l1_norm(std::span<const cdouble> z) {
    double acc = 0.0;
    for (const cdouble& v : z) acc += std::abs(v);
    return acc;
}

double max_abs(std::span<const cdouble> z) {
    double m = 0.0;
    for (const cdouble& v : z) m = std::max(m, std::abs(v));
    return m;
}

ComplexGrid residual_of(const ComplexGrid& y, const ComplexGrid& predicted) {
    ComplexGrid r = y;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= predicted[i];
    return r;
}

}  // namespace

void SolverConfig::validate() const {
    if (lambda && !(*lambda >= 0.0)) throw ConfigError("solver.lambda must be >= 0");
    if (!(lambda_scale >= 0.0)) throw ConfigError("solver.lambda_scale must be >= 0");
    if (step_mu && !(*step_mu > 0.0)) throw ConfigError("solver.step must be > 0 or auto");
    if (max_iterations < 1) throw ConfigError("solver.max_iterations must be >= 1");
    if (!(tolerance >= 0.0)) throw ConfigError("solver.tolerance must be >= 0");
    if (!step_mu && norm_power_iterations < 10) {
        throw ConfigError("solver.power_iterations must be >= 10");
    }
}

void soft_threshold_inplace(std::span<cdouble> z, double threshold) {
    if (!(threshold >= 0.0)) throw ConfigError("soft threshold must be >= 0");
    for (cdouble& v : z) {
        const double mag = std::abs(v);
        v = mag <= threshold ? cdouble{0.0, 0.0} : v * ((mag - threshold) / mag);
    }
}

std::vector<cdouble> soft_threshold(std::span<const cdouble> z, double threshold) {
    std::vector<cdouble> out(z.begin(), z.end());
    soft_threshold_inplace(out, threshold);
    return out;
}

std::pair<double, double> objective(const ObservationOperator& op, const ComplexGrid& y,
                                    const ComplexGrid& theta_f, double lambda) {
    const ComplexGrid r = residual_of(y, op.apply_forward(theta_f).data);
    return {0.5 * squared_norm(r.values()), lambda * l1_norm(theta_f.values())};
}

ComplexGrid bp_initial_guess(const ObservationOperator& op, const ComplexGrid& y,
                             const ComplexImage& bp_interferogram) {
    ComplexGrid theta_f = bp_interferogram.data;
    fft::unitary2d(theta_f, fft::Direction::Forward);
    const ComplexGrid predicted = op.apply_forward(theta_f).data;
    const double energy = squared_norm(predicted.values());
    if (energy == 0.0) return ComplexGrid(theta_f.rows(), theta_f.cols());
    const cdouble scale = inner(predicted.values(), y.values()) / energy;
    for (cdouble& v : theta_f.values()) v *= scale;
    return theta_f;
}

SolveResult solve(const ObservationOperator& op, const ComplexGrid& y, const SolverConfig& cfg,
                  const ComplexGrid* initial_theta_f) {
    using clock = std::chrono::steady_clock;
    cfg.validate();
    const AcquisitionGeometry& geom = op.geometry();
    if (y.rows() != geom.pulse_count || y.cols() != geom.range_sample_count) {
        throw ShapeError("observed echo does not match the operator geometry");
    }

    SolveReport report;
    if (cfg.step_mu) {
        report.step_mu = *cfg.step_mu;
    } else {
        report.operator_norm = operator_norm(op, cfg.norm_power_iterations);
        if (report.operator_norm == 0.0) throw NumericalError("observation operator is zero");
        report.step_mu = 0.99 / (report.operator_norm * report.operator_norm);
    }
    const double mu = report.step_mu;

    ComplexGrid theta_f(op.grid().rows, op.grid().cols);
    if (initial_theta_f) {
        require_same_shape(*initial_theta_f, theta_f, "solve initial guess");
        theta_f = *initial_theta_f;
    }
    ComplexGrid predicted = initial_theta_f ? op.apply_forward(theta_f).data
                                            : ComplexGrid(y.rows(), y.cols());

    for (std::size_t k = 0; k < cfg.max_iterations; ++k) {
        const auto start = clock::now();
        ComplexGrid z = op.apply_adjoint(residual_of(y, predicted));
        if (k == 0 && cfg.lambda) {
            report.lambda = *cfg.lambda;
        } else if (k == 0) {
            const double peak = initial_theta_f ? max_abs(op.apply_adjoint(y).values())
                                                : max_abs(z.values());
            report.lambda = cfg.lambda_scale * peak;
        }
        for (std::size_t i = 0; i < z.size(); ++i) z[i] = theta_f[i] + mu * z[i];
        soft_threshold_inplace(z.values(), mu * report.lambda);

        predicted = op.apply_forward(z).data;
        const ComplexGrid r = residual_of(y, predicted);
        const double residual = norm2(r.values());
        report.data_term.push_back(0.5 * residual * residual);
        report.penalty.push_back(report.lambda * l1_norm(z.values()));
        report.residual_norm.push_back(residual);
        report.seconds.push_back(std::chrono::duration<double>(clock::now() - start).count());

        if (!std::isfinite(report.data_term.back() + report.penalty.back())) {
            throw SolverDivergence("objective became non-finite at iteration " +
                                       std::to_string(k + 1),
                                   std::move(report));
        }

        double change = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) change += std::norm(z[i] - theta_f[i]);
        change = std::sqrt(change);
        const double previous = norm2(theta_f.values());
        theta_f = std::move(z);
        const bool stalled = previous == 0.0 ? change == 0.0 : change / previous < cfg.tolerance;
        if (stalled) {
            report.converged = true;
            break;
        }
    }

    const auto zeros = std::count(theta_f.values().begin(), theta_f.values().end(),
                                  cdouble{0.0, 0.0});
    report.sparsity = static_cast<double>(zeros) / static_cast<double>(theta_f.size());

    ComplexImage theta{theta_f, op.grid()};
    fft::unitary2d(theta.data, fft::Direction::Backward);
    return {std::move(theta), std::move(theta_f), std::move(report)};
}

}  // namespace insar
