#pragma once

#include <span>
#include <vector>

namespace rsde {

/// Solution of the one-sided Skorohod problem at grid knots: x = y + k with
/// x >= 0 and k the minimal nondecreasing pusher.
struct SkorohodPair {
    std::vector<double> x;
    std::vector<double> k;
};

/// k_i = -min(0, min_{j <= i} y_j), x = y + k. Single pass. Throws if y is
/// empty or y_0 < 0.
SkorohodPair skorohod_map(std::span<const double> y);

/// Default reporting band 1e-12 (1 + max |y|) for exactly known inputs.
double exact_input_band(std::span<const double> y);

/// Sum of pusher increments k_{i+1} - k_i over steps that end at a state
/// x_{i+1} above `band`. Zero when k only moves at the boundary.
double complementarity_leakage(std::span<const double> x, std::span<const double> k, double band);

}  // namespace rsde
