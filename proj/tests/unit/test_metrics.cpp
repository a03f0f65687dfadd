#include <doctest.h>

#include <cmath>
#include <random>

#include "insar/error.hpp"
#include "insar/metrics.hpp"
#include "insar/scene.hpp"

using namespace insar;

namespace {

ComplexGrid from_phase(const RealGrid& phase, double magnitude = 1.0) {
    ComplexGrid g(phase.rows(), phase.cols());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::polar(magnitude, phase[i]);
    return g;
}

RealGrid ramp(std::size_t rows, std::size_t cols, double step_r, double step_c) {
    RealGrid p(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) p(r, c) = wrap_phase(step_r * double(r) + step_c * double(c));
    }
    return p;
}

RealGrid uniform_phase(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    RealGrid p(rows, cols);
    for (double& v : p.values()) v = u(rng);
    return p;
}

RealGrid vortex(std::size_t n) {
    RealGrid p(n, n);
    const double centre = 0.5 * double(n - 1);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) p(r, c) = std::atan2(double(r) - centre, double(c) - centre);
    }
    return p;
}

}  // namespace

TEST_CASE("phase RMSE examples") {
    const RealGrid truth = ramp(16, 16, 0.3, -0.7);
    CHECK(phase_rmse(from_phase(truth), truth) <= 1e-15);

    RealGrid shifted = truth;
    for (double& v : shifted.values()) v = wrap_phase(v + kPi / 6);
    CHECK(phase_rmse(from_phase(shifted), truth) == doctest::Approx(kPi / 6).epsilon(1e-12));

    const RealGrid constant(64, 64, 0.4);
    const double rmse = phase_rmse(from_phase(uniform_phase(64, 64, 3)), constant);
    CHECK(rmse == doctest::Approx(kPi / std::sqrt(3.0)).epsilon(0.02));
}

TEST_CASE("phase RMSE depends only on the argument") {
    const RealGrid truth = uniform_phase(20, 20, 1);
    const RealGrid est = uniform_phase(20, 20, 2);
    const double base = phase_rmse(from_phase(est), truth);
    CHECK(phase_rmse(from_phase(est, 1e-6), truth) == base);
    CHECK(phase_rmse(from_phase(est, 37.5), truth) == doctest::Approx(base).epsilon(1e-15));

    ComplexGrid own = from_phase(est, 3.0);
    CHECK(phase_rmse(own, wrapped_phase(own)) == 0.0);
}

TEST_CASE("phase RMSE over a region") {
    RealGrid truth(8, 8, 0.0);
    RealGrid est(8, 8, 0.0);
    est(0, 0) = 1.0;
    const RegionMask inner = border_region(8, 8, 1);
    CHECK(phase_rmse(from_phase(est), truth, &inner) == 0.0);
    CHECK(phase_rmse(from_phase(est), truth) == doctest::Approx(1.0 / 8.0));
    const RegionMask empty = border_region(8, 8, 4);
    CHECK_THROWS_AS(phase_rmse(from_phase(est), truth, &empty), ConfigError);
    CHECK_THROWS_AS(phase_rmse(ComplexGrid(4, 4), truth), ShapeError);
}

TEST_CASE("coherence examples") {
    const RealGrid truth = uniform_phase(32, 32, 4);
    CHECK(mean_coherence(from_phase(truth), truth, 5) == doctest::Approx(1.0).epsilon(1e-12));

    RealGrid offset = truth;
    for (double& v : offset.values()) v = wrap_phase(v + 1.1);
    CHECK(mean_coherence(from_phase(offset), truth, 5) == doctest::Approx(1.0).epsilon(1e-12));

    const double noisy = mean_coherence(from_phase(uniform_phase(64, 64, 5)), RealGrid(64, 64), 5);
    CHECK(noisy < 0.3);
    CHECK(noisy > 0.05);
}

TEST_CASE("coherence window validation") {
    const RealGrid truth(8, 8);
    const ComplexGrid est(8, 8, 1.0);
    CHECK_THROWS_AS(mean_coherence(est, truth, 4), ConfigError);
    CHECK_THROWS_AS(mean_coherence(est, truth, 1), ConfigError);
    CHECK_THROWS_AS(mean_coherence(est, truth, 9), ConfigError);
    CHECK_NOTHROW(mean_coherence(est, truth, 7));
}

TEST_CASE("residue counting") {
    CHECK(count_residues(ramp(32, 32, 0.9, -1.3)) == 0);
    CHECK(count_residues(RealGrid(5, 5, 2.0)) == 0);

    const RealGrid v = vortex(10);
    CHECK(count_residues(v) == 1);
    RealGrid negated = v;
    for (double& x : negated.values()) x = wrap_phase(-x);
    CHECK(count_residues(negated) == 1);

    const RealGrid noise = uniform_phase(40, 40, 8);
    RealGrid flipped = noise;
    for (double& x : flipped.values()) x = wrap_phase(-x);
    const std::size_t n = count_residues(noise);
    CHECK(n > 0);
    CHECK(count_residues(flipped) == n);

    CHECK_THROWS_AS(count_residues(RealGrid(1, 5)), ConfigError);
}

TEST_CASE("evaluate_phase bundles the three metrics") {
    const RealGrid truth = ramp(16, 16, 0.2, 0.1);
    const ComplexGrid est = from_phase(vortex(16), 2.0);
    const PhaseMetrics m = evaluate_phase(est, truth, 3);
    CHECK(m.rmse_rad == phase_rmse(est, truth));
    CHECK(m.mean_coherence == mean_coherence(est, truth, 3));
    CHECK(m.residue_count == 1);
    CHECK(m.rmse_rad <= kPi);
    CHECK(m.mean_coherence >= 0.0);
    CHECK(m.mean_coherence <= 1.0);
}
