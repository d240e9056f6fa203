#include "rsde/stratonovich.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rsde {

namespace {

std::size_t require_partition_knot(const Partition& pi, double t, const char* who) {
    const std::size_t K = pi.find_knot(t);
    if (K == TimeGrid::npos) {
        throw std::invalid_argument(std::string(who) + ": t = " + std::to_string(t) +
                                    " is not a partition knot");
    }
    return K;
}

std::size_t require_fine_knot(const TimeGrid& grid, double t, const char* who) {
    const std::size_t i = grid.find_knot(t);
    if (i == TimeGrid::npos) {
        throw std::invalid_argument(std::string(who) + ": t = " + std::to_string(t) +
                                    " is not a fine-grid knot");
    }
    return i;
}

/// Trapezoid time-average over fine knots [m, m_end] of the running sum
/// G_s = q[m] + ... + q[s-1] (G_m = 0).
double averaged_running_sum(std::span<const double> q, const TimeGrid& grid, std::size_t m,
                            std::size_t m_end) {
    double g = 0.0;
    double integral = 0.0;
    for (std::size_t s = m; s < m_end; ++s) {
        const double g_next = g + q[s];
        integral += 0.5 * (g + g_next) * grid.dt(s);
        g = g_next;
    }
    return integral / (grid[m_end] - grid[m]);
}

/// Per fine step j: sigma(X_{j+1}) - sigma(X_j) split as
/// martingale + boundary + drift + remainder.
struct StepTerms {
    std::vector<double> martingale;
    std::vector<double> boundary;
    std::vector<double> drift;
    std::vector<double> remainder;
};

StepTerms step_terms(const ReflectedPath& rp, const CoefficientSet& c, const BrownianPath& b) {
    const TimeGrid& grid = b.grid();
    const std::size_t n = grid.intervals();
    const auto dB = b.increments();
    StepTerms st;
    st.martingale.resize(n);
    st.boundary.resize(n);
    st.drift.resize(n);
    st.remainder.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double x = rp.X[j];
        const double s = rp.sigma[j];
        const double sp = c.sigma_prime(x);
        const double spp = c.sigma_second(x);
        const double dL = rp.local_time_increment(j);
        st.martingale[j] = sp * s * dB[j];
        st.boundary[j] = dL != 0.0 ? c.sigma_prime(rp.X[j + 1]) * dL : 0.0;
        st.drift[j] = 0.5 * (sp * sp * s + spp * s * s) * grid.dt(j);
        const double d = rp.sigma[j + 1] - s;
        st.remainder[j] = d - st.martingale[j] - st.boundary[j] - st.drift[j];
    }
    return st;
}

ErrorDecomposition decompose_with(const StepTerms& st, const ReflectedPath& rp,
                                  const BrownianPath& b, const std::vector<double>& ref,
                                  const Partition& pi, double t) {
    const std::size_t K = require_partition_knot(pi, t, "decompose_error");
    const TimeGrid& grid = b.grid();
    const auto dB = b.increments();
    const auto inc = coarse_increments(b, pi);

    ErrorDecomposition e;
    e.mesh = pi.mesh();
    double left_sum = 0.0;
    double a2_sum = 0.0;
    double a3_sum = 0.0;
    double a4_sum = 0.0;
    double rem_sum = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        const std::size_t m = pi.fine_index(k);
        const std::size_t m_end = pi.fine_index(k + 1);
        left_sum += rp.sigma[m] * inc[k];
        a2_sum += averaged_running_sum(st.martingale, grid, m, m_end) * inc[k];
        const double drift_avg = averaged_running_sum(st.drift, grid, m, m_end);
        const double rem_avg = averaged_running_sum(st.remainder, grid, m, m_end);
        a3_sum += (drift_avg + rem_avg) * inc[k];
        rem_sum += rem_avg * inc[k];
        a4_sum += averaged_running_sum(st.boundary, grid, m, m_end) * inc[k];
    }

    const std::size_t end = pi.fine_index(K);
    double ito = 0.0;
    double correction = 0.0;
    for (std::size_t j = 0; j < end; ++j) {
        ito += rp.sigma[j] * dB[j];
        correction += 0.5 * (rp.drift[j] + rp.drift[j + 1]) * grid.dt(j);
    }
    e.a1 = left_sum - ito;
    e.a2 = a2_sum - correction;
    e.a3 = a3_sum;
    e.a4 = a4_sum;
    e.ito_remainder = rem_sum;
    e.riemann_sum = riemann_sum(rp.sigma, pi, b, t).value;
    e.reference = ref[end];
    e.total = e.riemann_sum - e.reference;
    return e;
}

double push_state(const ReflectedPath& rp, std::size_t j, PushEvaluation eval) {
    return eval == PushEvaluation::projected ? rp.X[j + 1] : rp.X[j];
}

}  // namespace

std::vector<double> RiemannSumResult::partial_sums() const {
    std::vector<double> out(per_interval_terms.size() + 1, 0.0);
    for (std::size_t k = 0; k < per_interval_terms.size(); ++k) out[k + 1] = out[k] + per_interval_terms[k];
    return out;
}

RiemannSumResult riemann_sum(std::span<const double> f, const Partition& pi, const BrownianPath& b,
                             double t) {
    if (f.size() != b.grid().size()) {
        throw std::invalid_argument("riemann_sum: integrand is not sampled on the Brownian grid");
    }
    return riemann_sum(f, pi, coarse_increments(b, pi), t);
}

RiemannSumResult riemann_sum(std::span<const double> f, const Partition& pi,
                             std::span<const double> increments, double t) {
    const TimeGrid& grid = pi.fine();
    if (f.size() != grid.size()) {
        throw std::invalid_argument("riemann_sum: integrand is not sampled on the partition's fine grid");
    }
    if (increments.size() != pi.intervals()) {
        throw std::invalid_argument("riemann_sum: one increment per partition interval expected");
    }
    const std::size_t K = require_partition_knot(pi, t, "riemann_sum");

    RiemannSumResult r;
    r.mesh = pi.mesh();
    r.t = t;
    r.per_interval_terms.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        const std::size_t m = pi.fine_index(k);
        const std::size_t m_end = pi.fine_index(k + 1);
        double integral = 0.0;
        for (std::size_t j = m; j < m_end; ++j) integral += 0.5 * (f[j] + f[j + 1]) * grid.dt(j);
        const double avg = integral / (grid[m_end] - grid[m]);
        r.per_interval_terms[k] = avg * increments[k];
        r.value += r.per_interval_terms[k];
    }
    return r;
}

std::vector<double> reference_integral_path(const ReflectedPath& rp, const BrownianPath& b) {
    const TimeGrid& grid = b.grid();
    if (rp.X.size() != grid.size() || rp.sigma.size() != grid.size()) {
        throw std::invalid_argument("reference_integral: path and Brownian grid differ");
    }
    const auto dB = b.increments();
    std::vector<double> out(grid.size());
    double ito = 0.0;
    double correction = 0.0;
    out[0] = 0.0;
    for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
        ito += rp.sigma[j] * dB[j];
        correction += 0.5 * (rp.drift[j] + rp.drift[j + 1]) * grid.dt(j);
        out[j + 1] = ito + correction;
    }
    return out;
}

double reference_integral(const ReflectedPath& rp, const BrownianPath& b, double t) {
    const std::size_t i = require_fine_knot(b.grid(), t, "reference_integral");
    return reference_integral_path(rp, b)[i];
}

ErrorDecomposition decompose_error(const ReflectedPath& rp, const CoefficientSet& c,
                                   const BrownianPath& b, const Partition& pi, double t) {
    return decompose_error(rp, c, b, std::span<const Partition>(&pi, 1), t).front();
}

std::vector<ErrorDecomposition> decompose_error(const ReflectedPath& rp, const CoefficientSet& c,
                                                const BrownianPath& b,
                                                std::span<const Partition> partitions, double t) {
    if (rp.X.size() != b.grid().size()) {
        throw std::invalid_argument("decompose_error: path and Brownian grid differ");
    }
    const StepTerms st = step_terms(rp, c, b);
    const auto ref = reference_integral_path(rp, b);
    std::vector<ErrorDecomposition> out;
    out.reserve(partitions.size());
    for (const Partition& pi : partitions) out.push_back(decompose_with(st, rp, b, ref, pi, t));
    return out;
}

std::pair<double, double> boundary_sigma_prime_identity(const ReflectedPath& rp,
                                                        const CoefficientSet& c, PushEvaluation eval) {
    double lhs = 0.0;
    for (std::size_t j = 0; j + 1 < rp.X.size(); ++j) {
        const double dL = rp.local_time_increment(j);
        if (dL != 0.0) lhs += c.sigma_prime(push_state(rp, j, eval)) * dL;
    }
    return {lhs, c.sigma_prime(0.0) * rp.L.back()};
}

TestFunction TestFunction::tent(double lo, double hi) {
    if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("tent: need 0 < lo < hi");
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    return TestFunction{[mid, half](double x) { return std::max(0.0, 1.0 - std::abs(x - mid) / half); },
                        lo, hi};
}

double local_time_functional(const ReflectedPath& rp, const TestFunction& l, double t,
                             PushEvaluation eval) {
    if (!l.fn || !(l.support_lo > 0.0) || !(l.support_hi > l.support_lo)) {
        throw std::invalid_argument(
            "local_time_functional: test function needs a support [lo, hi] with 0 < lo < hi");
    }
    if (!rp.grid) throw std::invalid_argument("local_time_functional: path has no grid");
    const std::size_t end = require_fine_knot(*rp.grid, t, "local_time_functional");
    double F = 0.0;
    for (std::size_t j = 0; j < end; ++j) {
        const double dL = rp.local_time_increment(j);
        if (dL != 0.0) F += l(push_state(rp, j, eval)) * dL;
    }
    return F;
}

}  // namespace rsde
