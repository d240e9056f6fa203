#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "rsde/coefficients.hpp"
#include "rsde/paths.hpp"
#include "rsde/reflect.hpp"

namespace rsde {

/// Partition-averaged Riemann sum of a fine-grid integrand up to a partition
/// knot t: summand k is (trapezoid time-average of f over [t_k, t_{k+1}])
/// times (B_{t_{k+1}} - B_{t_k}).
struct RiemannSumResult {
    double mesh = 0.0;
    double t = 1.0;
    double value = 0.0;
    std::vector<double> per_interval_terms;

    /// Running sums at partition knots 0..K (first entry 0).
    std::vector<double> partial_sums() const;
};

RiemannSumResult riemann_sum(std::span<const double> f, const Partition& pi, const BrownianPath& b,
                             double t = 1.0);

/// Variant taking coarse_increments(b, pi) precomputed; f lives on pi.fine().
RiemannSumResult riemann_sum(std::span<const double> f, const Partition& pi,
                             std::span<const double> increments, double t = 1.0);

/// Fine-grid reference I(t) = sum sigma(X_i) dB_i + trapezoid of a(X), at
/// every fine knot.
std::vector<double> reference_integral_path(const ReflectedPath& rp, const BrownianPath& b);
double reference_integral(const ReflectedPath& rp, const BrownianPath& b, double t = 1.0);

/// The four-term split of S_pi(t) - I(t).
///
/// a1: left-point partition sum minus the fine Ito sum.
/// a2: averaged martingale part sigma' sigma dB of sigma(X_s) - sigma(X_{t_k}),
///     minus the Stratonovich correction.
/// a3: averaged bounded-variation part; on the discrete scheme it is the
///     analytic drift (sigma'^2 sigma + sigma'' sigma^2) / 2 plus the scheme's
///     Ito-expansion remainder, which is reported separately.
/// a4: averaged boundary part sigma' dL.
struct ErrorDecomposition {
    double mesh = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
    double a3 = 0.0;
    double a4 = 0.0;
    /// S_pi - I, computed independently of the four terms.
    double total = 0.0;
    /// Part of a3 coming from the discrete Ito remainder.
    double ito_remainder = 0.0;
    double riemann_sum = 0.0;
    double reference = 0.0;

    double sum() const { return a1 + a2 + a3 + a4; }
    double residual() const { return sum() - total; }
};

ErrorDecomposition decompose_error(const ReflectedPath& rp, const CoefficientSet& c,
                                   const BrownianPath& b, const Partition& pi, double t = 1.0);

/// Same as decompose_error for several partitions, sharing per-step terms.
std::vector<ErrorDecomposition> decompose_error(const ReflectedPath& rp, const CoefficientSet& c,
                                                const BrownianPath& b,
                                                std::span<const Partition> partitions, double t = 1.0);

/// Where dL-weighted sums evaluate their integrand on a push step: at the
/// projected state X_{i+1} (0 on push steps), or at the pre-step state X_i.
enum class PushEvaluation { projected, pre_step };

/// (sum sigma'(X at push) dL, sigma'(0) L_1).
std::pair<double, double> boundary_sigma_prime_identity(
    const ReflectedPath& rp, const CoefficientSet& c, PushEvaluation eval = PushEvaluation::projected);

/// Continuous test function with compact support [lo, hi] inside (0, inf).
struct TestFunction {
    std::function<double(double)> fn;
    double support_lo = 0.0;
    double support_hi = 0.0;

    double operator()(double x) const {
        return (x >= support_lo && x <= support_hi) ? fn(x) : 0.0;
    }
    /// Piecewise-linear tent on [lo, hi], peak 1 at the midpoint.
    static TestFunction tent(double lo, double hi);
};

/// F(t) = sum over steps up to t of l(X at push) dL.
double local_time_functional(const ReflectedPath& rp, const TestFunction& l, double t = 1.0,
                             PushEvaluation eval = PushEvaluation::projected);

}  // namespace rsde
