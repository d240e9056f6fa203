#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace rsde {

/// Declared Lipschitz constants for sigma, sigma' and sigma''.
struct LipschitzBounds {
    double sigma = 0.0;
    double sigma_prime = 0.0;
    double sigma_second = 0.0;
};

/// Diffusion coefficient sigma with its first two derivatives.
///
/// Built-in families dispatch on an enum so the solver's inner loop stays
/// inlinable; `custom` wraps arbitrary callables (tests, deliberate mismatches).
class CoefficientSet {
public:
    enum class Family { constant, linear, sine, saturating, custom };

    using Field = std::function<double(double)>;

    /// sigma(x) = c.
    static CoefficientSet constant(double c);
    /// sigma(x) = k x.
    static CoefficientSet linear(double k = 1.0);
    /// sigma(x) = offset + sin x.
    static CoefficientSet sine(double offset = 2.0);
    /// sigma(x) = 1 + x / (1 + x) for x >= 0, continued by its
    /// third-order Taylor polynomial 1 + x - x^2 + x^3 for x < 0 (C^3 at 0).
    static CoefficientSet saturating();
    static CoefficientSet custom(std::string name, Field sigma, Field sigma_prime, Field sigma_second,
                                 LipschitzBounds bounds);

    /// Resolve a built-in by config name ("constant", "zero", "linear", "sine",
    /// "saturating"); `param` is the family's optional scalar.
    static CoefficientSet from_name(const std::string& name, double param);
    static CoefficientSet from_name(const std::string& name);
    static std::vector<std::string> builtin_names();

    const std::string& name() const { return name_; }
    Family family() const { return family_; }
    double param() const { return param_; }
    const LipschitzBounds& lipschitz() const { return bounds_; }
    bool is_constant() const { return family_ == Family::constant; }

    double sigma(double x) const {
        switch (family_) {
            case Family::constant: return param_;
            case Family::linear: return param_ * x;
            case Family::sine: return param_ + std::sin(x);
            case Family::saturating: return x >= 0.0 ? 1.0 + x / (1.0 + x) : 1.0 + x - x * x + x * x * x;
            case Family::custom: break;
        }
        return sigma_(x);
    }

    double sigma_prime(double x) const {
        switch (family_) {
            case Family::constant: return 0.0;
            case Family::linear: return param_;
            case Family::sine: return std::cos(x);
            case Family::saturating: {
                if (x < 0.0) return 1.0 - 2.0 * x + 3.0 * x * x;
                const double d = 1.0 + x;
                return 1.0 / (d * d);
            }
            case Family::custom: break;
        }
        return sigma_prime_(x);
    }

    double sigma_second(double x) const {
        switch (family_) {
            case Family::constant: return 0.0;
            case Family::linear: return 0.0;
            case Family::sine: return -std::sin(x);
            case Family::saturating: {
                if (x < 0.0) return -2.0 + 6.0 * x;
                const double d = 1.0 + x;
                return -2.0 / (d * d * d);
            }
            case Family::custom: break;
        }
        return sigma_second_(x);
    }

    struct Value {
        double sigma;
        double sigma_prime;
    };

    /// sigma and sigma' together; the solver's per-step evaluation.
    Value sigma_and_prime(double x) const {
        if (family_ == Family::sine) {
            const double s = std::sin(x);
            const double c = std::cos(x);
            return {param_ + s, c};
        }
        return {sigma(x), sigma_prime(x)};
    }

    /// Ito drift a(x) = sigma(x) sigma'(x) / 2.
    double ito_drift(double x) const { return 0.5 * sigma(x) * sigma_prime(x); }

private:
    CoefficientSet(std::string name, Family family, double param, LipschitzBounds bounds)
        : name_(std::move(name)), family_(family), param_(param), bounds_(bounds) {}

    std::string name_;
    Family family_;
    double param_ = 0.0;
    LipschitzBounds bounds_;
    Field sigma_, sigma_prime_, sigma_second_;
};

inline double ito_drift(const CoefficientSet& c, double x) { return c.ito_drift(x); }

/// Closed lattice [lo, hi] with the given step.
struct LatticeRange {
    double lo = -1.0;
    double hi = 50.0;
    double step = 1e-2;
};

struct ValidationReport {
    bool passed = true;
    /// Worst |central difference - derivative| / (1 + |derivative|), over
    /// the sigma/sigma' and sigma'/sigma'' pairs.
    double worst_derivative_mismatch = 0.0;
    /// Worst observed difference quotient divided by the declared constant.
    double worst_lipschitz_ratio = 0.0;
    std::vector<std::string> failures;
};

/// Checks derivative consistency (central difference, step 1e-5, tolerance
/// 1e-6 (1 + |f'|)) and declared Lipschitz constants (slack 1.01) on a lattice.
ValidationReport validate_coefficients(const CoefficientSet& c, const LatticeRange& lattice = {});

/// max |sigma| over a lattice; used to size complementarity bands.
double sup_abs_sigma(const CoefficientSet& c, const LatticeRange& lattice);

}  // namespace rsde
