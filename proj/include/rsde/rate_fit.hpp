#pragma once

#include <span>
#include <string>
#include <vector>

namespace rsde {

/// Least-squares line through (log abscissa, log error).
struct RateFit {
    std::string label;
    std::vector<double> abscissae;
    std::vector<double> errors;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::vector<std::string> warnings;

    /// exp(intercept): the fitted constant C in error ~ C * abscissa^slope.
    double constant() const;
};

/// Points with non-positive (or non-finite) abscissa or error are dropped
/// with a warning; fewer than 3 surviving points throws.
RateFit fit_rate(std::span<const double> abscissae, std::span<const double> errors,
                 std::string label = {});

}  // namespace rsde
