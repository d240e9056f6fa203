#include "rsde/monte_carlo.hpp"

#include <omp.h>

#include <cmath>
#include <exception>
#include <stdexcept>

namespace rsde {

std::vector<double> SampleMatrix::column(std::size_t stat) const {
    std::vector<double> out(n_paths_);
    for (std::size_t i = 0; i < n_paths_; ++i) out[i] = data_[i * n_stats_ + stat];
    return out;
}

SampleMatrix mc_sample(std::size_t n_paths, std::uint64_t seed, std::size_t n_stats,
                       const PathKernel& kernel, int workers) {
    SampleMatrix m(n_paths, n_stats);
    const int threads = workers > 0 ? workers : omp_get_max_threads();
    std::exception_ptr error;
    const auto n = static_cast<std::int64_t>(n_paths);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            kernel(BrownianKey{seed, static_cast<std::uint64_t>(i)}, m.row(static_cast<std::size_t>(i)));
        } catch (...) {
#pragma omp critical(rsde_mc_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return m;
}

SampleMatrix mc_sample_serial(std::size_t n_paths, std::uint64_t seed, std::size_t n_stats,
                              const PathKernel& kernel) {
    SampleMatrix m(n_paths, n_stats);
    for (std::size_t i = 0; i < n_paths; ++i) kernel(BrownianKey{seed, i}, m.row(i));
    return m;
}

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

double MomentEstimate::norm() const {
    if (p > 0.0) return std::pow(value, 1.0 / p);
    return value;
}

double MomentEstimate::norm_stderr() const {
    if (p > 0.0) {
        if (value <= 0.0) return 0.0;
        return standard_error * std::pow(value, 1.0 / p - 1.0) / p;
    }
    return standard_error;
}

MomentEstimate summarize(std::span<const double> samples, double p, std::uint64_t seed,
                         std::string label, std::string cell) {
    std::vector<double> y;
    y.reserve(samples.size());
    MomentEstimate e;
    e.label = std::move(label);
    e.cell = std::move(cell);
    e.p = p;
    e.seed = seed;
    for (double s : samples) {
        const double v = p > 0.0 ? std::pow(std::abs(s), p) : s;
        if (std::isfinite(v)) {
            y.push_back(v);
        } else {
            ++e.n_nonfinite;
        }
    }
    e.n_paths = y.size();
    if (y.empty()) {
        e.value = NAN;
        e.standard_error = NAN;
        return e;
    }
    const double n = static_cast<double>(y.size());
    e.value = pairwise_sum(y) / n;
    if (y.size() > 1) {
        std::vector<double> sq(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) sq[i] = (y[i] - e.value) * (y[i] - e.value);
        e.standard_error = std::sqrt(pairwise_sum(sq) / (n - 1.0)) / std::sqrt(n);
    }
    return e;
}

MomentEstimate mc_estimate(const std::function<double(BrownianKey)>& statistic, std::size_t n_paths,
                           std::uint64_t seed, double p, int workers) {
    if (n_paths < 2) throw std::invalid_argument("mc_estimate: need n_paths >= 2");
    auto m = mc_sample(
        n_paths, seed, 1, [&](BrownianKey key, std::span<double> out) { out[0] = statistic(key); },
        workers);
    return summarize(m.data(), p, seed);
}

}  // namespace rsde
