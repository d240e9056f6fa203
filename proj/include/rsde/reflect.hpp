#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rsde/coefficients.hpp"
#include "rsde/paths.hpp"

namespace rsde {

/// State X and boundary local time L of the reflected equation on a fine grid,
/// for one initial value. `sigma` and `drift` cache sigma(X_i) and
/// a(X_i) = sigma sigma'(X_i) / 2 at every knot; downstream sums reuse them.
struct ReflectedPath {
    GridPtr grid;
    double x0 = 0.0;
    std::vector<double> X;
    std::vector<double> L;
    std::vector<double> sigma;
    std::vector<double> drift;
    BrownianKey key;

    std::size_t size() const { return X.size(); }
    double local_time_increment(std::size_t i) const { return L[i + 1] - L[i]; }
};

/// Projected Euler-Maruyama in Ito form. With Y the free path
///   Y_{i+1} = Y_i + sigma(X_i) dB_i + a(X_i) dt_i,  Y_0 = x0,
/// the local time is L_{i+1} = max(L_i, -Y_{i+1}) and X = Y + L. This equals
/// U = X_i + sigma dB + a dt, X_{i+1} = max(0, U), dL = max(0, -U) step by
/// step, and makes X exactly 0 on every push step.
ReflectedPath solve_reflected(double x0, const CoefficientSet& c, const BrownianPath& b);

/// Lock-step solve for several initial values driven by the same Brownian
/// path: time outer, initial value inner, so independent coefficient
/// evaluations overlap. Each output is bit-identical to solve_reflected.
std::vector<ReflectedPath> solve_reflected_batch(std::span<const double> x0s, const CoefficientSet& c,
                                                 const BrownianPath& b);

/// Running-infimum representation -inf_{s<=t}(free_s ^ 0) of the local time,
/// with the free path rebuilt from the solved X inside the integrands.
std::vector<double> local_time_via_reflection(const ReflectedPath& rp, const CoefficientSet& c,
                                              const BrownianPath& b);
std::vector<double> local_time_via_reflection(double x0, const CoefficientSet& c,
                                              const BrownianPath& b);

/// Evenly spaced initial values origin + i * spacing, i < count.
struct Lattice {
    double origin = 0.0;
    double spacing = 1.0 / 16.0;
    std::size_t count = 81;

    double point(std::size_t i) const { return origin + static_cast<double>(i) * spacing; }
    double max() const { return point(count - 1); }
    /// Lattice covering [0, r] with the given spacing.
    static Lattice covering(double r, double spacing);
};

/// One reflected path per lattice point, all driven by the same Brownian path.
struct FlowField {
    Lattice lattice;
    BrownianKey key;
    std::vector<ReflectedPath> paths;
};

FlowField solve_flow(const Lattice& lattice, const CoefficientSet& c, const BrownianPath& b);

/// Linear interpolation in x between the bracketing lattice paths, knot by
/// knot, for X and L. A lattice point returns that path unchanged. The
/// integrand caches are re-evaluated on the interpolated state.
ReflectedPath evaluate_flow_at(const FlowField& f, double z, const CoefficientSet& c);

}  // namespace rsde
