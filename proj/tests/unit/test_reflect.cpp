#include <doctest.h>

#include <cmath>
#include <memory>

#include "oracles.hpp"
#include "rsde/reflect.hpp"
#include "rsde/skorohod.hpp"

using namespace rsde;

namespace {
GridPtr grid_of(std::size_t n) { return std::make_shared<const TimeGrid>(make_fine_grid(n)); }

void check_path_invariants(const ReflectedPath& rp) {
    CHECK(rp.L[0] == 0.0);
    for (std::size_t i = 0; i < rp.size(); ++i) {
        REQUIRE(rp.X[i] >= 0.0);
        if (i + 1 < rp.size()) {
            REQUIRE(rp.L[i + 1] >= rp.L[i]);
            if (rp.local_time_increment(i) > 0.0) REQUIRE(rp.X[i + 1] == 0.0);
        }
    }
}
}  // namespace

TEST_CASE("no noise, no motion") {
    const auto g = grid_of(256);
    const auto b = sample_brownian({1, 0}, g);
    const auto rp = solve_reflected(2.0, CoefficientSet::constant(0.0), b);
    for (std::size_t i = 0; i < rp.size(); ++i) {
        CHECK(rp.X[i] == 2.0);
        CHECK(rp.L[i] == 0.0);
    }
}

TEST_CASE("additive noise equals the Skorohod map of the free path") {
    const auto g = grid_of(1024);
    for (double x0 : {0.0, 1.0}) {
        for (std::uint64_t idx = 0; idx < 20; ++idx) {
            const auto b = sample_brownian({3, idx}, g);
            const auto rp = solve_reflected(x0, CoefficientSet::constant(1.0), b);
            std::vector<double> y(b.values().begin(), b.values().end());
            for (double& v : y) v += x0;
            const auto p = skorohod_map(y);
            CHECK(rp.X == p.x);
            CHECK(rp.L == p.k);
        }
    }
}

TEST_CASE("agrees with the textbook projected Euler step") {
    const auto g = grid_of(2048);
    const auto c = CoefficientSet::sine();
    for (std::uint64_t idx = 0; idx < 10; ++idx) {
        const auto b = sample_brownian({4, idx}, g);
        const auto rp = solve_reflected(0.3, c, b);
        const auto [X, L] = oracle::projected_euler(
            0.3, b.increments(), g->mesh(), [](double x) { return 2.0 + std::sin(x); },
            [](double x) { return std::cos(x); });
        for (std::size_t i = 0; i < rp.size(); ++i) {
            REQUIRE(std::abs(rp.X[i] - X[i]) <= 1e-11);
            REQUIRE(std::abs(rp.L[i] - L[i]) <= 1e-11);
        }
        check_path_invariants(rp);
    }
}

TEST_CASE("scheme telescoping identity") {
    const auto g = grid_of(4096);
    const auto c = CoefficientSet::sine();
    const auto b = sample_brownian({5, 0}, g);
    const auto rp = solve_reflected(0.0, c, b);
    const auto dB = b.increments();
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < rp.size(); ++i) {
        sum += c.sigma(rp.X[i]) * dB[i] + c.ito_drift(rp.X[i]) * g->dt(i);
        CHECK(std::abs(rp.X[i + 1] - (sum + rp.L[i + 1])) <= 1e-12 * (1.0 + rp.L[i + 1]));
    }
    CHECK(rp.sigma.back() == c.sigma(rp.X.back()));
}

TEST_CASE("batch solve is bit-identical to single solves") {
    const auto g = grid_of(1024);
    const auto b = sample_brownian({6, 2}, g);
    const std::vector<double> x0s{0.0, 0.0625, 0.5, 1.0, 5.0};
    for (const auto& c : {CoefficientSet::sine(), CoefficientSet::saturating(), CoefficientSet::linear()}) {
        const auto batch = solve_reflected_batch(x0s, c, b);
        for (std::size_t p = 0; p < x0s.size(); ++p) {
            const auto single = solve_reflected(x0s[p], c, b);
            CHECK(batch[p].X == single.X);
            CHECK(batch[p].L == single.L);
            CHECK(batch[p].sigma == single.sigma);
            CHECK(batch[p].drift == single.drift);
        }
    }
    CHECK_THROWS(solve_reflected_batch(std::vector<double>{1.0, -1.0}, CoefficientSet::sine(), b));
}

TEST_CASE("negative start is rejected") {
    const auto g = grid_of(16);
    const auto b = sample_brownian({1, 0}, g);
    CHECK_THROWS_AS(solve_reflected(-0.5, CoefficientSet::sine(), b), std::invalid_argument);
}

TEST_CASE("linear sigma tracks exp(B)") {
    // dX = X o dB from 1 solves to exp(B); the path never reaches 0.
    std::vector<double> rms;
    std::vector<double> hs;
    for (std::size_t n : {std::size_t{256}, std::size_t{1024}, std::size_t{4096}}) {
        const auto g = grid_of(n);
        double acc = 0.0;
        for (std::uint64_t idx = 0; idx < 200; ++idx) {
            const auto b = sample_brownian({7, idx}, g);
            const auto rp = solve_reflected(1.0, CoefficientSet::linear(), b);
            CHECK(rp.L.back() == 0.0);
            double sup = 0.0;
            for (std::size_t i = 0; i < rp.size(); ++i) sup = std::max(sup, std::abs(rp.X[i] - std::exp(b[i])));
            acc += sup * sup;
        }
        rms.push_back(std::sqrt(acc / 200));
        hs.push_back(1.0 / static_cast<double>(n));
    }
    CHECK(rms[2] < rms[1]);
    CHECK(rms[1] < rms[0]);
    CHECK(oracle::loglog_slope(hs, rms) >= 0.4);
}

TEST_CASE("local time through the reflection formula") {
    const auto g = grid_of(1024);
    const auto b = sample_brownian({8, 0}, g);

    const auto one = solve_reflected(0.0, CoefficientSet::constant(1.0), b);
    CHECK(local_time_via_reflection(one, CoefficientSet::constant(1.0), b) == one.L);

    const auto lin = local_time_via_reflection(1.0, CoefficientSet::linear(), b);
    for (double v : lin) CHECK(v == 0.0);

    const auto c = CoefficientSet::sine();
    const auto rp = solve_reflected(0.0, c, b);
    const auto lt = local_time_via_reflection(rp, c, b);
    for (std::size_t i = 0; i < rp.size(); ++i) CHECK(lt[i] == doctest::Approx(rp.L[i]).epsilon(1e-12));
}

TEST_CASE("lattice helpers") {
    const auto lat = Lattice::covering(5.0, 1.0 / 16.0);
    CHECK(lat.count == 81);
    CHECK(lat.max() == 5.0);
    CHECK_THROWS(Lattice::covering(1.0, 0.3));
}

TEST_CASE("flow evaluation") {
    const auto g = grid_of(2048);
    const auto c = CoefficientSet::sine();
    const auto b = sample_brownian({9, 1}, g);
    const Lattice lat{0.0, 0.5, 11};
    const auto flow = solve_flow(lat, c, b);
    REQUIRE(flow.paths.size() == 11);
    CHECK(flow.key == b.key());

    const auto at = evaluate_flow_at(flow, 1.5, c);
    const auto direct = solve_reflected(1.5, c, b);
    CHECK(at.X == direct.X);
    CHECK(at.L == direct.L);
    CHECK(at.sigma == direct.sigma);

    CHECK_THROWS(evaluate_flow_at(flow, 5.5, c));
    CHECK_THROWS(evaluate_flow_at(flow, -0.1, c));

    const auto zero = CoefficientSet::constant(0.0);
    const auto still = solve_flow(lat, zero, b);
    const auto mid = evaluate_flow_at(still, 1.25, zero);
    for (double x : mid.X) CHECK(x == 1.25);

    // Interpolation error shrinks with the spacing.
    const double z = 1.0 + 1.0 / 3.0;
    const auto exact = solve_reflected(z, c, b);
    double prev = INFINITY;
    for (double dx : {0.5, 0.25, 0.125, 0.0625}) {
        const auto k = static_cast<std::size_t>(std::floor(z / dx));
        const FlowField f = solve_flow(Lattice{static_cast<double>(k) * dx, dx, 2}, c, b);
        const auto p = evaluate_flow_at(f, z, c);
        double sup = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) sup = std::max(sup, std::abs(p.X[i] - exact.X[i]));
        CHECK(sup < prev);
        prev = sup;
    }
}

TEST_CASE("flow order is preserved") {
    const auto g = grid_of(4096);
    const auto c = CoefficientSet::sine();
    std::size_t violations = 0;
    std::size_t total = 0;
    for (std::uint64_t idx = 0; idx < 5; ++idx) {
        const auto b = sample_brownian({10, idx}, g);
        const auto f = solve_flow(Lattice{0.0, 0.5, 11}, c, b);
        for (std::size_t p = 0; p + 1 < f.paths.size(); ++p) {
            for (std::size_t i = 0; i < g->size(); ++i) {
                violations += f.paths[p].X[i] > f.paths[p + 1].X[i] + 1e-8 ? 1 : 0;
                ++total;
            }
        }
    }
    CHECK(static_cast<double>(violations) / static_cast<double>(total) < 1e-3);
}
