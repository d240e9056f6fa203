#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>

#include "rsde/monte_carlo.hpp"
#include "rsde/rate_fit.hpp"
#include "rsde/reflect.hpp"

using namespace rsde;

TEST_CASE("parallel sampling equals the serial reference") {
    const auto g = std::make_shared<const TimeGrid>(make_fine_grid(256));
    const auto c = CoefficientSet::sine();
    const PathKernel k = [&](BrownianKey key, std::span<double> out) {
        const auto b = sample_brownian(key, g);
        const auto rp = solve_reflected(0.0, c, b);
        out[0] = rp.X.back();
        out[1] = rp.L.back();
        out[2] = static_cast<double>(key.path_index);
    };
    const auto serial = mc_sample_serial(300, 42, 3, k);
    for (int w : {1, 2, 4, 0}) {
        const auto par = mc_sample(300, 42, 3, k, w);
        CHECK(par.data() == serial.data());
    }
    CHECK(serial.row(17)[2] == 17.0);
    CHECK(serial.column(2).size() == 300);
}

TEST_CASE("kernel exceptions propagate") {
    const PathKernel k = [](BrownianKey key, std::span<double>) {
        if (key.path_index == 5) throw std::runtime_error("boom");
    };
    CHECK_THROWS_WITH(mc_sample(20, 1, 1, k, 4), "boom");
    CHECK_THROWS_WITH(mc_sample_serial(20, 1, 1, k), "boom");
}

TEST_CASE("pairwise summation") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(10007);
    long double exact = 0.0L;
    for (double& x : v) {
        x = u(rng);
        exact += x;
    }
    CHECK(pairwise_sum(v) == doctest::Approx(static_cast<double>(exact)).epsilon(1e-13));
    CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
    CHECK(pairwise_sum(std::vector<double>{2.5}) == 2.5);
}

TEST_CASE("summaries") {
    const std::vector<double> ones(50, 1.0);
    const auto e = summarize(ones, 0.0, 3);
    CHECK(e.value == 1.0);
    CHECK(e.standard_error == 0.0);
    CHECK(e.n_paths == 50);

    const std::vector<double> v{1.0, -2.0, 3.0, -4.0};
    const auto m2 = summarize(v, 2.0, 0);
    CHECK(m2.value == 7.5);
    // Sample std of {1, 4, 9, 16} divided by 2.
    const double sd = std::sqrt(((1 - 7.5) * (1 - 7.5) + (4 - 7.5) * (4 - 7.5) + (9 - 7.5) * (9 - 7.5) +
                                 (16 - 7.5) * (16 - 7.5)) / 3.0);
    CHECK(m2.standard_error == doctest::Approx(sd / 2.0));
    CHECK(m2.norm() == doctest::Approx(std::sqrt(7.5)));
    CHECK(m2.norm_stderr() == doctest::Approx(m2.standard_error / (2.0 * std::sqrt(7.5))));

    const std::vector<double> bad{1.0, NAN, 3.0, INFINITY};
    const auto f = summarize(bad, 0.0, 0);
    CHECK(f.n_nonfinite == 2);
    CHECK(f.n_paths == 2);
    CHECK(f.value == 2.0);
    CHECK(std::isfinite(f.value));
}

TEST_CASE("mc_estimate preconditions and constants") {
    const auto e = mc_estimate([](BrownianKey) { return 1.0; }, 100, 1);
    CHECK(e.value == 1.0);
    CHECK(e.standard_error == 0.0);
    CHECK_THROWS(mc_estimate([](BrownianKey) { return 1.0; }, 1, 1));
}

TEST_CASE("reflected walk at the horizon against the running maximum") {
    // With unit noise X_n = S_n - min_k S_k, which by time reversal of the
    // Gaussian walk has the law of max_k S_k. Same-key pairing gives a joint
    // standard error for the difference of means.
    const auto g = std::make_shared<const TimeGrid>(make_fine_grid(256));
    const auto one = CoefficientSet::constant(1.0);
    const std::size_t n = 100000;
    const auto s = mc_sample(n, 77, 2, [&](BrownianKey key, std::span<double> out) {
        const auto b = sample_brownian(key, g);
        const auto rp = solve_reflected(0.0, one, b);
        double mb = 0.0;
        for (std::size_t i = 0; i < rp.size(); ++i) mb = std::max(mb, b[i]);
        out[0] = rp.X.back();
        out[1] = mb;
    });
    std::vector<double> diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = s.row(i)[0] - s.row(i)[1];
    const auto d = summarize(diff, 0.0, 77);
    CHECK(std::abs(d.value) <= 3.0 * d.standard_error);
}

TEST_CASE("rate fits") {
    const std::vector<double> x{0.5, 0.25, 0.125, 0.0625};
    const auto lin = fit_rate(x, x);
    CHECK(lin.slope == doctest::Approx(1.0));
    CHECK(lin.r_squared == doctest::Approx(1.0));
    CHECK(lin.constant() == doctest::Approx(1.0));

    std::vector<double> root;
    for (double v : x) root.push_back(std::sqrt(v));
    const auto half = fit_rate(x, root);
    CHECK(half.slope == doctest::Approx(0.5));
    CHECK(half.r_squared == doctest::Approx(1.0));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    std::vector<double> xs, ys;
    for (int k = 1; k <= 8; ++k) {
        xs.push_back(std::ldexp(1.0, -k));
        ys.push_back(2.0 * std::sqrt(xs.back()) * (1.0 + u(rng)));
    }
    const auto noisy = fit_rate(xs, ys);
    CHECK(noisy.slope >= 0.45);
    CHECK(noisy.slope <= 0.55);
    CHECK(noisy.r_squared >= 0.0);
    CHECK(noisy.r_squared <= 1.0);

    const std::vector<double> with_zero{0.5, 0.0, 0.125, 0.0625};
    const auto dropped = fit_rate(x, with_zero);
    CHECK(dropped.warnings.size() == 1);
    CHECK(dropped.abscissae.size() == 3);
    const std::vector<double> two_left{0.5, 0.0, -1.0, 0.0625};
    CHECK_THROWS(fit_rate(x, two_left));
}
