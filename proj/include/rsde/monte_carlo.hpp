#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rsde/paths.hpp"

namespace rsde {

/// Per-path statistics, row-major: row = path index, column = statistic.
class SampleMatrix {
public:
    SampleMatrix(std::size_t n_paths, std::size_t n_stats)
        : n_paths_(n_paths), n_stats_(n_stats), data_(n_paths * n_stats, 0.0) {}

    std::size_t n_paths() const { return n_paths_; }
    std::size_t n_stats() const { return n_stats_; }
    std::span<double> row(std::size_t path) { return {data_.data() + path * n_stats_, n_stats_}; }
    std::span<const double> row(std::size_t path) const {
        return {data_.data() + path * n_stats_, n_stats_};
    }
    std::vector<double> column(std::size_t stat) const;
    const std::vector<double>& data() const { return data_; }

private:
    std::size_t n_paths_;
    std::size_t n_stats_;
    std::vector<double> data_;
};

/// Fills one row of statistics for the path keyed by `key`.
using PathKernel = std::function<void(BrownianKey key, std::span<double> out)>;

/// OpenMP-parallel evaluation over path indices 0..n_paths-1. `workers` = 0
/// uses the OpenMP default. Rows depend only on their key, so the result is
/// identical to mc_sample_serial for any worker count.
SampleMatrix mc_sample(std::size_t n_paths, std::uint64_t seed, std::size_t n_stats,
                       const PathKernel& kernel, int workers = 0);

/// Serial reference for mc_sample.
SampleMatrix mc_sample_serial(std::size_t n_paths, std::uint64_t seed, std::size_t n_stats,
                              const PathKernel& kernel);

/// Order-fixed pairwise summation.
double pairwise_sum(std::span<const double> v);

struct MomentEstimate {
    std::string label;
    std::string cell;
    /// Moment order: the estimate is E|Y|^p for p > 0 and E[Y] for p = 0.
    double p = 0.0;
    double value = 0.0;
    double standard_error = 0.0;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    /// Samples that were not finite; excluded from value and standard error.
    std::size_t n_nonfinite = 0;

    /// value^(1/p) for p > 0, value otherwise.
    double norm() const;
    /// Delta-method standard error of norm().
    double norm_stderr() const;
};

/// Mean and standard error (sample std / sqrt(n)) of |y|^p (or y when p = 0).
MomentEstimate summarize(std::span<const double> samples, double p, std::uint64_t seed,
                         std::string label = {}, std::string cell = {});

/// Monte Carlo estimate of a scalar path functional over keys (seed, 0..n_paths-1).
MomentEstimate mc_estimate(const std::function<double(BrownianKey)>& statistic, std::size_t n_paths,
                           std::uint64_t seed, double p = 0.0, int workers = 0);

}  // namespace rsde
