#include "rsde/reflect.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rsde {

ReflectedPath solve_reflected(double x0, const CoefficientSet& c, const BrownianPath& b) {
    if (!(x0 >= 0.0)) {
        throw std::invalid_argument("solve_reflected: initial value must be >= 0, got " + std::to_string(x0));
    }
    const TimeGrid& grid = b.grid();
    const std::size_t n = grid.intervals();
    const auto dB = b.increments();

    ReflectedPath rp;
    rp.grid = b.grid_ptr();
    rp.x0 = x0;
    rp.key = b.key();
    rp.X.resize(n + 1);
    rp.L.resize(n + 1);
    rp.sigma.resize(n + 1);
    rp.drift.resize(n + 1);

    const bool uniform = grid.uniform_intervals() != 0;
    const double h = grid.mesh();

    double y = x0;
    double l = 0.0;
    double x = x0;
    rp.X[0] = x0;
    rp.L[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto v = c.sigma_and_prime(x);
        const double s = v.sigma;
        const double a = 0.5 * s * v.sigma_prime;
        rp.sigma[i] = s;
        rp.drift[i] = a;
        y += s * dB[i] + a * (uniform ? h : grid.dt(i));
        l = std::max(l, -y);
        x = y + l;
        rp.X[i + 1] = x;
        rp.L[i + 1] = l;
    }
    rp.sigma[n] = c.sigma(x);
    rp.drift[n] = 0.5 * rp.sigma[n] * c.sigma_prime(x);
    return rp;
}

std::vector<ReflectedPath> solve_reflected_batch(std::span<const double> x0s, const CoefficientSet& c,
                                                 const BrownianPath& b) {
    for (double x0 : x0s) {
        if (!(x0 >= 0.0)) {
            throw std::invalid_argument("solve_reflected_batch: initial value must be >= 0, got " +
                                        std::to_string(x0));
        }
    }
    const TimeGrid& grid = b.grid();
    const std::size_t n = grid.intervals();
    const std::size_t m = x0s.size();
    const auto dB = b.increments();
    const bool uniform = grid.uniform_intervals() != 0;
    const double h = grid.mesh();

    std::vector<ReflectedPath> out(m);
    std::vector<double> y(x0s.begin(), x0s.end());
    std::vector<double> l(m, 0.0);
    std::vector<double> x(x0s.begin(), x0s.end());
    for (std::size_t p = 0; p < m; ++p) {
        ReflectedPath& rp = out[p];
        rp.grid = b.grid_ptr();
        rp.x0 = x0s[p];
        rp.key = b.key();
        rp.X.resize(n + 1);
        rp.L.resize(n + 1);
        rp.sigma.resize(n + 1);
        rp.drift.resize(n + 1);
        rp.X[0] = x0s[p];
        rp.L[0] = 0.0;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double dt = uniform ? h : grid.dt(i);
        for (std::size_t p = 0; p < m; ++p) {
            const auto v = c.sigma_and_prime(x[p]);
            const double s = v.sigma;
            const double a = 0.5 * s * v.sigma_prime;
            ReflectedPath& rp = out[p];
            rp.sigma[i] = s;
            rp.drift[i] = a;
            y[p] += s * dB[i] + a * dt;
            l[p] = std::max(l[p], -y[p]);
            x[p] = y[p] + l[p];
            rp.X[i + 1] = x[p];
            rp.L[i + 1] = l[p];
        }
    }
    for (std::size_t p = 0; p < m; ++p) {
        ReflectedPath& rp = out[p];
        rp.sigma[n] = c.sigma(x[p]);
        rp.drift[n] = 0.5 * rp.sigma[n] * c.sigma_prime(x[p]);
    }
    return out;
}

std::vector<double> local_time_via_reflection(const ReflectedPath& rp, const CoefficientSet& c,
                                              const BrownianPath& b) {
    const TimeGrid& grid = b.grid();
    const auto dB = b.increments();
    if (rp.X.size() != grid.size()) {
        throw std::invalid_argument("local_time_via_reflection: path and Brownian grid differ");
    }
    std::vector<double> out(rp.X.size());
    double free_path = rp.x0;
    double running_inf = std::min(free_path, 0.0);
    out[0] = -running_inf;
    for (std::size_t i = 0; i + 1 < rp.X.size(); ++i) {
        const double xi = rp.X[i];
        free_path += c.sigma(xi) * dB[i] + c.ito_drift(xi) * grid.dt(i);
        running_inf = std::min(running_inf, free_path);
        out[i + 1] = -running_inf;
    }
    return out;
}

std::vector<double> local_time_via_reflection(double x0, const CoefficientSet& c,
                                              const BrownianPath& b) {
    return local_time_via_reflection(solve_reflected(x0, c, b), c, b);
}

Lattice Lattice::covering(double r, double spacing) {
    if (!(spacing > 0.0) || !(r >= 0.0)) {
        throw std::invalid_argument("Lattice::covering: need r >= 0 and spacing > 0");
    }
    const double cells = r / spacing;
    const auto n = static_cast<std::size_t>(std::llround(cells));
    if (std::abs(cells - static_cast<double>(n)) > 1e-9 * std::max(1.0, cells)) {
        throw std::invalid_argument("Lattice::covering: spacing must divide the range");
    }
    return Lattice{0.0, spacing, n + 1};
}

FlowField solve_flow(const Lattice& lattice, const CoefficientSet& c, const BrownianPath& b) {
    if (lattice.count == 0 || !(lattice.spacing > 0.0) || !(lattice.origin >= 0.0)) {
        throw std::invalid_argument("solve_flow: lattice needs count >= 1, spacing > 0, origin >= 0");
    }
    std::vector<double> x0s(lattice.count);
    for (std::size_t i = 0; i < lattice.count; ++i) x0s[i] = lattice.point(i);
    return FlowField{lattice, b.key(), solve_reflected_batch(x0s, c, b)};
}

ReflectedPath evaluate_flow_at(const FlowField& f, double z, const CoefficientSet& c) {
    const Lattice& lat = f.lattice;
    if (f.paths.empty()) throw std::invalid_argument("evaluate_flow_at: empty flow");
    if (!(z >= lat.origin && z <= lat.max())) {
        throw std::invalid_argument("evaluate_flow_at: z = " + std::to_string(z) + " outside [" +
                                    std::to_string(lat.origin) + ", " + std::to_string(lat.max()) + "]");
    }
    const double u = (z - lat.origin) / lat.spacing;
    auto lo = static_cast<std::size_t>(std::floor(u));
    if (lo >= lat.count - 1) lo = lat.count - 1;
    if (lat.point(lo) == z) return f.paths[lo];
    if (lo + 1 < lat.count && lat.point(lo + 1) == z) return f.paths[lo + 1];

    const ReflectedPath& a = f.paths[lo];
    const ReflectedPath& b = f.paths[lo + 1];
    const double w = (z - lat.point(lo)) / (lat.point(lo + 1) - lat.point(lo));

    ReflectedPath out;
    out.grid = a.grid;
    out.x0 = z;
    out.key = a.key;
    const std::size_t n = a.X.size();
    out.X.resize(n);
    out.L.resize(n);
    out.sigma.resize(n);
    out.drift.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = (1.0 - w) * a.X[i] + w * b.X[i];
        out.X[i] = x;
        out.L[i] = (1.0 - w) * a.L[i] + w * b.L[i];
        const auto v = c.sigma_and_prime(x);
        out.sigma[i] = v.sigma;
        out.drift[i] = 0.5 * v.sigma * v.sigma_prime;
    }
    return out;
}

}  // namespace rsde
