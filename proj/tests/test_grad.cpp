#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "holopt/field_model.hpp"
#include "holopt/grad.hpp"
#include "holopt/rng.hpp"
#include "oracles.hpp"

using namespace holopt;
using std::numbers::pi;

namespace {

ArrayLayout random_layout(Rng& rng, int m) {
    ArrayLayout lay;
    for (int i = 0; i < m; ++i) {
        Transducer t;
        t.position = {uniform_range(rng, -0.06, 0.06), uniform_range(rng, -0.06, 0.06), 0.0};
        t.normal = {0, 0, 1};
        lay.transducers.push_back(t);
    }
    lay.label = "rand";
    return lay;
}

std::vector<Vec3> random_points(Rng& rng, int c) {
    std::vector<Vec3> pts;
    for (int i = 0; i < c; ++i)
        pts.push_back({uniform_range(rng, -0.04, 0.04), uniform_range(rng, -0.04, 0.04),
                       uniform_range(rng, 0.06, 0.14)});
    return pts;
}

PhaseVector random_phases(Rng& rng, int m) {
    PhaseVector ph(m);
    for (auto& p : ph) p = uniform_range(rng, 0.0, 2.0 * pi);
    return ph;
}

// Targets a small relative distance from the achieved amplitudes, so finite
// differences stay well inside the smooth region of the loss.
std::vector<double> near_targets(const PhaseVector& phases, const PropagationMatrix& g) {
    std::vector<double> t;
    const auto report = pat_loss(phases, g, std::vector<double>(g.n_points, 1.0));
    for (size_t c = 0; c < report.per_point.size(); ++c)
        t.push_back(report.per_point[c].amplitude * (1.0 + (c % 2 ? 1e-3 : -1e-3)));
    return t;
}

}  // namespace

TEST_CASE("achieved targets give a zero gradient") {
    Rng rng(21);
    const auto lay = random_layout(rng, 12);
    const auto pts = random_points(rng, 4);
    const MediumConfig medium{};
    const auto g = propagation_matrix(lay, pts, medium);
    const auto phases = random_phases(rng, 12);

    std::vector<double> targets;
    const auto rep = pat_loss(phases, g, std::vector<double>(4, 1.0));
    for (const auto& p : rep.per_point) targets.push_back(p.amplitude);

    CHECK(pat_loss(phases, g, targets).loss < 1e-18);
    const auto grad = pat_loss_gradient(phases, g, targets);
    for (double v : grad) CHECK(v == 0.0);
}

TEST_CASE("single element drives a phase-invariant amplitude") {
    Rng rng(22);
    const auto lay = random_layout(rng, 1);
    const auto pts = random_points(rng, 1);
    const MediumConfig medium{};
    const auto g = propagation_matrix(lay, pts, medium);
    const auto grad = pat_loss_gradient({1.234}, g, {50.0});
    CHECK(std::abs(grad[0]) < 1e-12 * 50.0 * std::abs(g.at(0, 0)));
}

TEST_CASE("multi-point gradient matches central differences") {
    Rng rng(23);
    const MediumConfig medium{};
    const double h = 1e-6;
    for (int trial = 0; trial < 4; ++trial) {
        const int m = trial % 2 ? 8 : 16;
        const int c = 1 + trial;
        const auto lay = random_layout(rng, m);
        const auto pts = random_points(rng, c);
        const auto g = propagation_matrix(lay, pts, medium);
        auto phases = random_phases(rng, m);
        const auto targets = near_targets(phases, g);
        const auto grad = pat_loss_gradient(phases, g, targets);

        double scale = 0.0;
        for (double v : grad) scale = std::max(scale, std::abs(v));
        for (int i = 0; i < m; ++i) {
            auto hi = phases, lo = phases;
            hi[i] += h;
            lo[i] -= h;
            const double fd =
                (pat_loss(hi, g, targets).loss - pat_loss(lo, g, targets).loss) / (2.0 * h);
            if (std::abs(grad[i]) > 1e-8 * scale)
                CHECK(std::abs(fd - grad[i]) < 1e-6 * std::max(std::abs(fd), std::abs(grad[i])));
        }
    }
}

TEST_CASE("gradient is invariant under a global phase and 2 pi shifts") {
    Rng rng(24);
    const MediumConfig medium{};
    const auto lay = random_layout(rng, 10);
    const auto pts = random_points(rng, 3);
    const auto g = propagation_matrix(lay, pts, medium);
    const auto phases = random_phases(rng, 10);
    const auto targets = near_targets(phases, g);
    const auto base = pat_loss_gradient(phases, g, targets);
    const double base_loss = pat_loss(phases, g, targets).loss;

    double gmax = 0.0;
    for (double v : base) gmax = std::max(gmax, std::abs(v));

    for (double shift : {0.37, 2.0 * pi, -4.0 * pi + 0.37}) {
        auto shifted = phases;
        for (auto& p : shifted) p += shift;
        CHECK(pat_loss(shifted, g, targets).loss ==
              doctest::Approx(base_loss).epsilon(1e-12));
        const auto grad = pat_loss_gradient(shifted, g, targets);
        for (size_t i = 0; i < grad.size(); ++i)
            CHECK(std::abs(grad[i] - base[i]) < 1e-9 * gmax);
    }

    // Invariance along the all-ones direction means the components sum to 0.
    double sum = 0.0, abs_sum = 0.0;
    for (double v : base) {
        sum += v;
        abs_sum += std::abs(v);
    }
    CHECK(std::abs(sum) < 1e-9 * (1.0 + abs_sum));
}

TEST_CASE("small step against the gradient reduces the loss") {
    Rng rng(25);
    const MediumConfig medium{};
    const auto lay = random_layout(rng, 16);
    const auto pts = random_points(rng, 4);
    const auto g = propagation_matrix(lay, pts, medium);
    const auto phases = random_phases(rng, 16);
    std::vector<double> targets;
    const auto rep = pat_loss(phases, g, std::vector<double>(4, 1.0));
    for (const auto& p : rep.per_point) targets.push_back(p.amplitude * 1.3);

    const auto grad = pat_loss_gradient(phases, g, targets);
    double gnorm2 = 0.0;
    for (double v : grad) gnorm2 += v * v;
    REQUIRE(gnorm2 > 0.0);

    const double l0 = pat_loss(phases, g, targets).loss;
    auto stepped = phases;
    const double eta = 1e-7;
    for (size_t i = 0; i < stepped.size(); ++i) stepped[i] -= eta * grad[i];
    const double l1 = pat_loss(stepped, g, targets).loss;
    CHECK(l1 < l0);
    // First-order prediction holds to leading order.
    CHECK(l0 - l1 == doctest::Approx(eta * gnorm2).epsilon(1e-3));
}

TEST_CASE("exact pressure null is flagged and contributes nothing") {
    const MediumConfig medium{};
    ArrayLayout lay;
    lay.transducers.push_back({{-0.02, 0, 0}, {0, 0, 1}, kElementRadius, kElementPRef});
    lay.transducers.push_back({{+0.02, 0, 0}, {0, 0, 1}, kElementRadius, kElementPRef});
    const std::vector<Vec3> pts{{0, 0, 0.1}};
    const auto g = propagation_matrix(lay, pts, medium);
    // Opposite drives cancel exactly on the midplane.
    const PhaseVector phases{0.0, pi};
    std::vector<int> degenerate;
    const auto grad = pat_loss_gradient(phases, g, {100.0}, &degenerate);
    REQUIRE(degenerate.size() == 1);
    CHECK(degenerate[0] == 0);
    for (double v : grad) CHECK(v == 0.0);
    // The loss still counts the point: (A - 0)^2.
    CHECK(pat_loss(phases, g, {100.0}).loss == doctest::Approx(10000.0).epsilon(1e-12));
}

TEST_CASE("input validation for the multi-point loss") {
    Rng rng(26);
    const MediumConfig medium{};
    const auto lay = random_layout(rng, 4);
    const auto pts = random_points(rng, 2);
    const auto g = propagation_matrix(lay, pts, medium);
    const auto phases = random_phases(rng, 4);
    CHECK_THROWS_AS(pat_loss(phases, g, {1.0}), std::invalid_argument);           // wrong C
    CHECK_THROWS_AS(pat_loss({0.0}, g, {1.0, 1.0}), std::invalid_argument);       // wrong M
    CHECK_THROWS_AS(pat_loss(phases, g, {1.0, -2.0}), std::invalid_argument);     // A <= 0
    CHECK_THROWS_AS(pat_loss_gradient(phases, g, {1.0, 0.0}), std::invalid_argument);
}

// ---- image-target (plate) loss ---------------------------------------------

namespace {

constexpr double kWater = 2.0 * pi * 2.0e6 / 1480.0;
constexpr double kDx = 150e-6;
constexpr double kDist = 0.002;

PhasePlane random_phase_plane(Rng& rng, int n) {
    PhasePlane p;
    p.nx = p.ny = n;
    p.dx = kDx;
    p.values.resize(static_cast<size_t>(n) * n);
    for (auto& v : p.values) v = uniform_range(rng, -pi, pi);
    return p;
}

ComplexPlane to_field(const PhasePlane& phase, double amp) {
    ComplexPlane f;
    f.nx = phase.nx;
    f.ny = phase.ny;
    f.dx = phase.dx;
    f.values.reserve(phase.values.size());
    for (double v : phase.values) f.values.push_back(std::polar(amp, v));
    return f;
}

// Target a small distance away from the forward amplitude at phase, with
// alternating signs, so every pixel has a definite subgradient sign.
RealPlane near_target(const PhasePlane& phase, double amp, const AsmOptions& opts) {
    const auto fwd = propagate_cw(to_field(phase, amp), kDist, kWater, opts);
    RealPlane t;
    t.nx = fwd.nx;
    t.ny = fwd.ny;
    t.dx = fwd.dx;
    t.values.reserve(fwd.values.size());
    for (size_t i = 0; i < fwd.values.size(); ++i)
        t.values.push_back(std::abs(fwd.values[i]) * (1.0 + (i % 2 ? 1e-3 : -1e-3)));
    return t;
}

}  // namespace

TEST_CASE("plate loss agrees with the explicit DFT reference") {
    Rng rng(31);
    const auto phase = random_phase_plane(rng, 8);
    AsmOptions opts;
    opts.pad_factor = 2;
    const auto target = near_target(phase, 1.0, opts);

    const double got = plate_loss(phase, target, 1.0, kDist, kWater, opts);
    const auto fwd = oracle::propagate_dft(to_field(phase, 1.0), kDist, kWater, opts, false);
    double expect = 0.0;
    for (size_t i = 0; i < fwd.values.size(); ++i)
        expect += std::abs(std::abs(fwd.values[i]) - target.values[i]);
    CHECK(got == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("plate gradient matches central differences") {
    Rng rng(32);
    AsmOptions opts;
    opts.pad_factor = 2;
    const double h = 1e-6;
    for (int n : {8, 16}) {
        const auto phase = random_phase_plane(rng, n);
        const auto target = near_target(phase, 1.0, opts);
        const auto grad = plate_loss_gradient(phase, target, 1.0, kDist, kWater, opts);

        double scale = 0.0;
        for (double v : grad.values) scale = std::max(scale, std::abs(v));
        REQUIRE(scale > 0.0);
        for (size_t i = 0; i < phase.values.size(); ++i) {
            auto hi = phase, lo = phase;
            hi.values[i] += h;
            lo.values[i] -= h;
            const double fd = (plate_loss(hi, target, 1.0, kDist, kWater, opts) -
                               plate_loss(lo, target, 1.0, kDist, kWater, opts)) /
                              (2.0 * h);
            if (std::abs(grad.values[i]) > 1e-8 * scale)
                CHECK(std::abs(fd - grad.values[i]) <
                      1e-5 * std::max(std::abs(fd), std::abs(grad.values[i])));
        }
    }
}

TEST_CASE("achieved plate target sits entirely on the kink") {
    Rng rng(33);
    AsmOptions opts;
    opts.pad_factor = 2;
    const auto phase = random_phase_plane(rng, 8);
    const auto fwd = propagate_cw(to_field(phase, 1.0), kDist, kWater, opts);
    RealPlane target;
    target.nx = fwd.nx;
    target.ny = fwd.ny;
    target.dx = fwd.dx;
    for (const auto& v : fwd.values) target.values.push_back(std::abs(v));

    long n_sub = 0;
    const auto grad = plate_loss_gradient(phase, target, 1.0, kDist, kWater, opts, &n_sub);
    CHECK(n_sub == 64);
    for (double v : grad.values) CHECK(v == 0.0);
    CHECK(plate_loss(phase, target, 1.0, kDist, kWater, opts) == 0.0);
}

TEST_CASE("zero distance with a matched flat target has zero loss") {
    PhasePlane phase;
    phase.nx = phase.ny = 8;
    phase.dx = kDx;
    phase.values.assign(64, 0.0);
    RealPlane target = phase;
    target.values.assign(64, 2.5);
    AsmOptions opts;
    opts.pad_factor = 2;
    CHECK(plate_loss(phase, target, 2.5, 0.0, kWater, opts) < 1e-10);
}

TEST_CASE("fused evaluation equals the two separate calls") {
    Rng rng(34);
    AsmOptions opts;
    opts.pad_factor = 2;
    const auto phase = random_phase_plane(rng, 8);
    const auto target = near_target(phase, 1.0, opts);

    const auto fused = plate_loss_and_gradient(phase, target, 1.0, kDist, kWater, opts);
    CHECK(fused.loss == plate_loss(phase, target, 1.0, kDist, kWater, opts));
    long n_sub = 0;
    const auto grad = plate_loss_gradient(phase, target, 1.0, kDist, kWater, opts, &n_sub);
    REQUIRE(fused.gradient.values.size() == grad.values.size());
    for (size_t i = 0; i < grad.values.size(); ++i)
        CHECK(fused.gradient.values[i] == grad.values[i]);
    CHECK(fused.n_subgradient_pixels == n_sub);
}

TEST_CASE("plate shape and spacing mismatches are rejected") {
    Rng rng(35);
    const auto phase = random_phase_plane(rng, 8);
    AsmOptions opts;

    auto target = near_target(phase, 1.0, opts);
    auto wrong_shape = target;
    wrong_shape.nx = 4;
    wrong_shape.values.resize(32);
    CHECK_THROWS_AS(plate_loss(phase, wrong_shape, 1.0, kDist, kWater, opts),
                    std::invalid_argument);

    auto wrong_dx = target;
    wrong_dx.dx = 2.0 * kDx;
    CHECK_THROWS_AS(plate_loss(phase, wrong_dx, 1.0, kDist, kWater, opts),
                    std::invalid_argument);

    CHECK_THROWS_AS(plate_loss(phase, target, 0.0, kDist, kWater, opts), std::invalid_argument);
}
