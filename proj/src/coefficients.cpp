#include "rsde/coefficients.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rsde {

CoefficientSet CoefficientSet::constant(double c) {
    return CoefficientSet("constant", Family::constant, c, {0.0, 0.0, 0.0});
}

CoefficientSet CoefficientSet::linear(double k) {
    return CoefficientSet("linear", Family::linear, k, {std::abs(k), 0.0, 0.0});
}

CoefficientSet CoefficientSet::sine(double offset) {
    return CoefficientSet("sine", Family::sine, offset, {1.0, 1.0, 1.0});
}

CoefficientSet CoefficientSet::saturating() {
    // Bounds cover x >= -1: |sigma'| <= 6, |sigma''| <= 8, |sigma'''| <= 6.
    return CoefficientSet("saturating", Family::saturating, 0.0, {6.0, 8.0, 6.0});
}

CoefficientSet CoefficientSet::custom(std::string name, Field sigma, Field sigma_prime,
                                      Field sigma_second, LipschitzBounds bounds) {
    if (!sigma || !sigma_prime || !sigma_second) {
        throw std::invalid_argument("custom coefficients need sigma, sigma' and sigma''");
    }
    CoefficientSet c(std::move(name), Family::custom, 0.0, bounds);
    c.sigma_ = std::move(sigma);
    c.sigma_prime_ = std::move(sigma_prime);
    c.sigma_second_ = std::move(sigma_second);
    return c;
}

CoefficientSet CoefficientSet::from_name(const std::string& name, double param) {
    if (name == "constant") return constant(param);
    if (name == "zero") return constant(0.0);
    if (name == "linear") return linear(param);
    if (name == "sine") return sine(param);
    if (name == "saturating") return saturating();
    throw std::invalid_argument("unknown sigma '" + name + "'");
}

CoefficientSet CoefficientSet::from_name(const std::string& name) {
    if (name == "sine") return sine();
    return from_name(name, 1.0);
}

std::vector<std::string> CoefficientSet::builtin_names() {
    return {"constant", "zero", "linear", "sine", "saturating"};
}

namespace {

struct PairCheck {
    const char* label;
    std::function<double(double)> f;
    std::function<double(double)> df;
};

}  // namespace

ValidationReport validate_coefficients(const CoefficientSet& c, const LatticeRange& lattice) {
    if (!(lattice.step > 0.0) || !(lattice.hi > lattice.lo)) {
        throw std::invalid_argument("validate_coefficients: empty lattice");
    }
    constexpr double kFdStep = 1e-5;
    constexpr double kFdTol = 1e-6;
    constexpr double kSlack = 1.01;
    constexpr std::size_t kMaxListed = 20;

    ValidationReport report;
    std::size_t n_failures = 0;
    auto fail = [&](std::string msg) {
        report.passed = false;
        if (n_failures++ < kMaxListed) report.failures.push_back(std::move(msg));
    };

    const auto& lip = c.lipschitz();
    const PairCheck checks[] = {
        {"sigma", [&](double x) { return c.sigma(x); }, [&](double x) { return c.sigma_prime(x); }},
        {"sigma'", [&](double x) { return c.sigma_prime(x); },
         [&](double x) { return c.sigma_second(x); }},
    };

    const auto n = static_cast<std::size_t>(std::floor((lattice.hi - lattice.lo) / lattice.step + 0.5));
    for (std::size_t i = 0; i <= n; ++i) {
        const double x = lattice.lo + static_cast<double>(i) * lattice.step;
        for (const auto& chk : checks) {
            const double fd = (chk.f(x + kFdStep) - chk.f(x - kFdStep)) / (2.0 * kFdStep);
            const double d = chk.df(x);
            const double mismatch = std::abs(fd - d) / (1.0 + std::abs(d));
            report.worst_derivative_mismatch = std::max(report.worst_derivative_mismatch, mismatch);
            if (!(mismatch <= kFdTol)) {
                std::ostringstream os;
                os << "derivative of " << chk.label << " at x=" << x << ": finite difference " << fd
                   << " vs " << d;
                fail(os.str());
            }
        }
        if (i == n) break;
        const double y = x + lattice.step;
        const double funcs[3] = {c.sigma(y) - c.sigma(x), c.sigma_prime(y) - c.sigma_prime(x),
                                 c.sigma_second(y) - c.sigma_second(x)};
        const double bounds[3] = {lip.sigma, lip.sigma_prime, lip.sigma_second};
        const char* labels[3] = {"sigma", "sigma'", "sigma''"};
        for (int k = 0; k < 3; ++k) {
            const double q = std::abs(funcs[k]) / lattice.step;
            const double ratio = bounds[k] > 0.0 ? q / bounds[k] : (q == 0.0 ? 0.0 : INFINITY);
            report.worst_lipschitz_ratio = std::max(report.worst_lipschitz_ratio, ratio);
            if (!(ratio <= kSlack)) {
                std::ostringstream os;
                os << "Lipschitz bound of " << labels[k] << " exceeded on [" << x << ", " << y
                   << "]: quotient " << q << " > " << bounds[k];
                fail(os.str());
            }
        }
    }
    if (n_failures > kMaxListed) {
        report.failures.push_back("... " + std::to_string(n_failures - kMaxListed) + " more");
    }
    return report;
}

double sup_abs_sigma(const CoefficientSet& c, const LatticeRange& lattice) {
    double m = 0.0;
    const auto n = static_cast<std::size_t>(std::floor((lattice.hi - lattice.lo) / lattice.step + 0.5));
    for (std::size_t i = 0; i <= n; ++i) {
        m = std::max(m, std::abs(c.sigma(lattice.lo + static_cast<double>(i) * lattice.step)));
    }
    return m;
}

}  // namespace rsde
