#pragma once

// Independent reference computations for the unit and acceptance tests.
// Each is written directly from its definition and shares no code with the
// library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace oracle {

/// Skorohod pusher from the definition k_t = -min(0, min_{s<=t} y_s),
/// recomputing the infimum for every t: O(n^2).
inline std::pair<std::vector<double>, std::vector<double>> skorohod_bruteforce(std::span<const double> y) {
    std::vector<double> x(y.size()), k(y.size());
    for (std::size_t t = 0; t < y.size(); ++t) {
        double inf = 0.0;
        for (std::size_t s = 0; s <= t; ++s) inf = std::min(inf, y[s]);
        k[t] = -inf;
        x[t] = y[t] + k[t];
    }
    return {x, k};
}

/// Riemann sum on fine knots: interval k runs from knot idx[k] to idx[k+1];
/// time average by trapezoid over the fine knots, increment from B values.
inline double riemann_naive(std::span<const double> f, std::span<const double> B, std::span<const double> t,
                            std::span<const std::size_t> idx) {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
        double area = 0.0;
        for (std::size_t j = idx[k]; j < idx[k + 1]; ++j) area += (t[j + 1] - t[j]) * (f[j] + f[j + 1]) / 2.0;
        s += area / (t[idx[k + 1]] - t[idx[k]]) * (B[idx[k + 1]] - B[idx[k]]);
    }
    return s;
}

/// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& g, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = g(a) + g(b);
    for (int i = 1; i < n; ++i) s += g(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return s * h / 3.0;
}

/// E|N| for a standard normal, by quadrature of |x| phi(x) on [-12, 12].
inline double mean_abs_normal() {
    const double pi = std::acos(-1.0);
    return simpson([pi](double x) { return std::abs(x) * std::exp(-0.5 * x * x) / std::sqrt(2.0 * pi); }, -12.0,
                   12.0, 24000);
}

/// E|N|^p by the same quadrature.
inline double abs_normal_moment(double p) {
    const double pi = std::acos(-1.0);
    return simpson(
        [pi, p](double x) { return std::pow(std::abs(x), p) * std::exp(-0.5 * x * x) / std::sqrt(2.0 * pi); },
        -12.0, 12.0, 24000);
}

/// Projected Euler step in its textbook form: U = X + sigma dB + a dt,
/// X' = max(0, U), dL = max(0, -U).
template <class Sigma, class SigmaPrime>
std::pair<std::vector<double>, std::vector<double>> projected_euler(double x0, std::span<const double> dB, double h,
                                                                    Sigma sigma, SigmaPrime sigma_prime) {
    std::vector<double> X{x0}, L{0.0};
    for (double db : dB) {
        const double x = X.back();
        const double u = x + sigma(x) * db + 0.5 * sigma(x) * sigma_prime(x) * h;
        X.push_back(std::max(0.0, u));
        L.push_back(L.back() + std::max(0.0, -u));
    }
    return {X, L};
}

/// Ordinary least squares slope of log y on log x.
inline double loglog_slope(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle
