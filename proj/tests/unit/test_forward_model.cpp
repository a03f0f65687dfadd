#include <doctest.h>

#include <cmath>
#include <random>

#include "insar/error.hpp"
#include "insar/fft.hpp"
#include "insar/forward_model.hpp"
#include "support.hpp"

using namespace insar;

namespace {

struct Fixture {
    support::Setup s;
    ComplexImage slave;
};

Fixture cone_fixture(std::size_t n = 16, std::size_t pulses = 64) {
    Fixture f{support::small_setup(n, n, pulses), {}};
    const SceneModel scene = make_cone_scene(f.s.grid, 20.0, 1);
    const EchoMatrix es = simulate_echo(scene, f.s.geom, AntennaId::Slave, 0.0, 2);
    f.slave = bp_image(es, f.s.geom, AntennaId::Slave, 8, f.s.grid);
    return f;
}

ObservationOperator make_op(const Fixture& f, const SamplingMask* mask = nullptr) {
    return ObservationOperator(f.s.geom, f.slave, mask ? *mask : full_mask(f.s.geom.pulse_count), 8);
}

std::size_t peak_index(std::span<const cdouble> row) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < row.size(); ++i) {
        if (std::abs(row[i]) > std::abs(row[best])) best = i;
    }
    return best;
}

double dot_gap(const ComplexGrid& x, const ComplexGrid& ax, const ComplexGrid& y,
               const ComplexGrid& ahy) {
    const cdouble lhs = inner(ax.values(), y.values());
    const cdouble rhs = inner(x.values(), ahy.values());
    return std::abs(lhs - rhs) / (norm2(x.values()) * norm2(y.values()));
}

}  // namespace

TEST_CASE("scene synthesis") {
    const Fixture f = cone_fixture();
    const ObservationOperator op = make_op(f);
    const ComplexImage zero = op.synthesize_scene(ComplexGrid(16, 16));
    for (const cdouble& v : zero.data.values()) CHECK(v == cdouble{0.0, 0.0});

    ComplexGrid dc(16, 16);
    dc(0, 0) = 1.0;
    const ComplexImage scene = op.synthesize_scene(dc);
    for (std::size_t i = 0; i < scene.data.size(); ++i) {
        CHECK(std::abs(scene.data[i] - f.slave.data[i] / 16.0) <= 1e-12 * std::abs(f.slave.data[i]));
    }

    std::mt19937_64 rng(1);
    ComplexGrid theta = support::random_grid(16, 16, rng);
    ComplexGrid spatial = theta;
    fft::unitary2d(spatial, fft::Direction::Backward);
    CHECK(norm2(spatial.values()) == doctest::Approx(norm2(theta.values())).epsilon(1e-12));
    CHECK_THROWS_AS(op.synthesize_scene(ComplexGrid(8, 16)), ShapeError);
}

TEST_CASE("generated echo of a zero scene is zero") {
    const Fixture f = cone_fixture();
    const ObservationOperator op = make_op(f);
    const EchoMatrix e = op.generate_echo(ComplexGrid(16, 16));
    CHECK(e.data.rows() == 64);
    CHECK(e.data.cols() == f.s.geom.range_sample_count);
    for (const cdouble& v : e.data.values()) CHECK(v == cdouble{0.0, 0.0});
    const EchoMatrix fwd = op.apply_forward(ComplexGrid(16, 16));
    for (const cdouble& v : fwd.data.values()) CHECK(v == cdouble{0.0, 0.0});
    const ComplexGrid back = op.apply_adjoint(ComplexGrid(64, f.s.geom.range_sample_count));
    for (const cdouble& v : back.values()) CHECK(v == cdouble{0.0, 0.0});
}

TEST_CASE("echo generation is the adjoint of back-projection") {
    const Fixture f = cone_fixture();
    const SamplingMask mask = random_pulse_mask(64, 0.5, 3);
    const ObservationOperator op = make_op(f, &mask);
    std::mt19937_64 rng(33);
    for (int pair = 0; pair < 20; ++pair) {
        const ComplexGrid scene = support::random_grid(16, 16, rng);
        const ComplexGrid echo = support::random_grid(64, f.s.geom.range_sample_count, rng);
        const ComplexGrid bp = bp_image(apply_mask(EchoMatrix{echo, AntennaId::Master}, mask).data,
                                        f.s.geom, op.plan()).data;
        CHECK(dot_gap(scene, op.generate_echo(scene).data, echo, bp) <= 1e-9);
    }
}

TEST_CASE("generated echo peaks where the simulator puts the scatterer") {
    const Fixture f = cone_fixture();
    const ObservationOperator op = make_op(f);
    const std::size_t r = 5, c = 11;
    ComplexGrid pixel(16, 16);
    pixel(r, c) = 1.0;
    const EchoMatrix generated = op.generate_echo(pixel);
    const EchoMatrix simulated =
        simulate_echo(make_point_scene(f.s.grid, r, c), f.s.geom, AntennaId::Master, 0.0, 1);
    const ComplexGrid g = interpolate_range(range_compress(generated, f.s.geom), 8).data;
    const ComplexGrid s = interpolate_range(range_compress(simulated, f.s.geom), 8).data;
    for (std::size_t n = 0; n < 64; ++n) {
        const long a = static_cast<long>(peak_index(g.row(n)));
        const long b = static_cast<long>(peak_index(s.row(n)));
        CHECK(std::abs(a - b) <= 1);
    }
}

TEST_CASE("forward operator is linear") {
    const Fixture f = cone_fixture();
    const ObservationOperator op = make_op(f);
    std::mt19937_64 rng(2);
    const ComplexGrid t1 = support::random_grid(16, 16, rng);
    const ComplexGrid t2 = support::random_grid(16, 16, rng);
    const cdouble a{0.3, -1.2}, b{2.0, 0.5};
    ComplexGrid combo = t1;
    for (std::size_t i = 0; i < combo.size(); ++i) combo[i] = a * t1[i] + b * t2[i];
    const ComplexGrid y1 = op.apply_forward(t1).data;
    const ComplexGrid y2 = op.apply_forward(t2).data;
    ComplexGrid expected = y1;
    for (std::size_t i = 0; i < expected.size(); ++i) expected[i] = a * y1[i] + b * y2[i];
    CHECK(support::max_relative_diff(op.apply_forward(combo).data, expected) <= 1e-10);
}

TEST_CASE("forward and adjoint form an adjoint pair") {
    const Fixture f = cone_fixture();
    for (double fraction : {1.0, 0.5}) {
        const SamplingMask mask = random_pulse_mask(64, fraction, 8);
        const ObservationOperator op = make_op(f, &mask);
        std::mt19937_64 rng(44);
        for (int pair = 0; pair < 10; ++pair) {
            const ComplexGrid theta = support::random_grid(16, 16, rng);
            const ComplexGrid y = support::random_grid(64, f.s.geom.range_sample_count, rng);
            CHECK(dot_gap(theta, op.apply_forward(theta).data, y, op.apply_adjoint(y)) <= 1e-9);
        }
    }
}

TEST_CASE("flat scene residual maps to the DC coefficient") {
    const auto s = support::small_setup(16, 16, 64);
    const SceneModel flat = make_flat_scene(s.grid, 6);
    const EchoMatrix em = simulate_echo(flat, s.geom, AntennaId::Master, 0.0, 1);
    const EchoMatrix es = simulate_echo(flat, s.geom, AntennaId::Slave, 0.0, 2);
    const ObservationOperator op(s.geom, bp_image(es, s.geom, AntennaId::Slave, 8, s.grid),
                                 full_mask(64), 8);
    const ComplexGrid theta = op.apply_adjoint(em.data);
    const double dc = std::abs(theta(0, 0));
    for (std::size_t i = 1; i < theta.size(); ++i) CHECK(std::abs(theta[i]) < dc);
}

TEST_CASE("power iteration converges monotonically") {
    const Fixture f = cone_fixture();
    const ObservationOperator op = make_op(f);
    const PowerIterationResult res = operator_norm_history(op, 30);
    REQUIRE(res.history.size() == 30);
    for (std::size_t k = 1; k < res.history.size(); ++k) {
        CHECK(res.history[k] >= res.history[k - 1] * (1.0 - 1e-9));
    }
    const double last = res.history[29];
    CHECK(std::abs(last - res.history[28]) / last < 1e-3);
    CHECK(operator_norm(op, 30) == res.norm);

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        const ComplexGrid theta = support::random_grid(16, 16, rng);
        const double gain = norm2(op.apply_forward(theta).data.values()) / norm2(theta.values());
        CHECK(gain <= last * (1.0 + 1e-6));
    }
    CHECK_THROWS_AS(operator_norm(op, 9), ConfigError);
}

TEST_CASE("operator norm is homogeneous in the slave image") {
    const Fixture f = cone_fixture();
    Fixture doubled = f;
    for (cdouble& v : doubled.slave.data.values()) v *= 2.0;
    const double n1 = operator_norm(make_op(f), 30);
    const double n2 = operator_norm(make_op(doubled), 30);
    CHECK(n2 == doctest::Approx(2.0 * n1).epsilon(1e-3));
}

TEST_CASE("single pixel, single pulse operator norm") {
    AcquisitionGeometry g;
    g.pulse_count = 1;
    const ImagingGrid grid = centered_grid(g, 1, 1, 1.0);
    g = fit_swath(g, grid);
    const cdouble xs{0.6, -0.8 * 3.0};
    const ObservationOperator op(g, ComplexImage{ComplexGrid(1, 1, xs), grid}, full_mask(1), 8);

    const std::size_t m = g.range_sample_count;
    std::size_t in_band_bins = 0;
    for (std::size_t k = 0; k < m; ++k) {
        const double signed_bin = k < (m + 1) / 2 ? double(k) : double(k) - double(m);
        if (std::abs(signed_bin * g.sample_rate / double(m)) <= g.bandwidth / 2) ++in_band_bins;
    }
    const double expected = std::abs(xs) * std::sqrt(double(in_band_bins) / double(m));
    CHECK(operator_norm(op, 10) == doctest::Approx(expected).epsilon(1e-6));
    CHECK(norm2(op.apply_forward(ComplexGrid(1, 1, 1.0)).data.values()) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("all-dropped mask gives a zero operator") {
    const Fixture f = cone_fixture(8, 16);
    SamplingMask none;
    none.kept_pulses.assign(16, 0);
    const ObservationOperator op = make_op(f, &none);
    CHECK(operator_norm(op, 10) == 0.0);
}

TEST_CASE("masked forward equals the mask applied to the full forward") {
    const Fixture f = cone_fixture();
    const SamplingMask mask = random_pulse_mask(64, 0.5, 12);
    const ObservationOperator full = make_op(f);
    const ObservationOperator masked = make_op(f, &mask);
    std::mt19937_64 rng(6);
    const ComplexGrid theta = support::random_grid(16, 16, rng);
    const EchoMatrix expected = apply_mask(full.apply_forward(theta), mask);
    CHECK(masked.apply_forward(theta).data == expected.data);
}

TEST_CASE("normal operator is positive semidefinite with unit slave image") {
    const auto s = support::small_setup(16, 16, 64);
    const ObservationOperator op(s.geom, ComplexImage{ComplexGrid(16, 16, 1.0), s.grid},
                                 full_mask(64), 8);
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexGrid theta = support::random_grid(16, 16, rng);
        const ComplexGrid normal = op.apply_adjoint(op.apply_forward(theta).data);
        const cdouble q = inner(theta.values(), normal.values());
        CHECK(q.real() >= 0.0);
        CHECK(std::abs(q.imag()) <= 1e-10 * std::abs(q));
    }
}

TEST_CASE("degenerate slave images and mismatched masks are rejected") {
    const auto s = support::small_setup(8, 8, 16);
    const ComplexImage zero{ComplexGrid(8, 8), s.grid};
    CHECK_THROWS_AS(ObservationOperator(s.geom, zero, full_mask(16), 8), NumericalError);
    ComplexImage nan{ComplexGrid(8, 8, 1.0), s.grid};
    nan.data(2, 2) = {std::nan(""), 0.0};
    CHECK_THROWS_AS(ObservationOperator(s.geom, nan, full_mask(16), 8), NumericalError);
    const ComplexImage ok{ComplexGrid(8, 8, 1.0), s.grid};
    CHECK_THROWS_AS(ObservationOperator(s.geom, ok, full_mask(15), 8), ShapeError);
    const ObservationOperator op(s.geom, ok, full_mask(16), 8);
    CHECK_THROWS_AS(op.apply_adjoint(ComplexGrid(3, 3)), ShapeError);
}
