#include "rsde/skorohod.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rsde {

SkorohodPair skorohod_map(std::span<const double> y) {
    if (y.empty()) throw std::invalid_argument("skorohod_map: empty path");
    if (!(y[0] >= 0.0)) throw std::invalid_argument("skorohod_map: y(0) must be >= 0");

    SkorohodPair out;
    out.x.resize(y.size());
    out.k.resize(y.size());
    double k = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        k = std::max(k, -y[i]);
        out.k[i] = k;
        out.x[i] = y[i] + k;
    }
    return out;
}

double exact_input_band(std::span<const double> y) {
    double m = 0.0;
    for (double v : y) m = std::max(m, std::abs(v));
    return 1e-12 * (1.0 + m);
}

double complementarity_leakage(std::span<const double> x, std::span<const double> k, double band) {
    if (x.size() != k.size()) throw std::invalid_argument("complementarity_leakage: size mismatch");
    double leak = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        if (x[i + 1] > band) leak += k[i + 1] - k[i];
    }
    return leak;
}

}  // namespace rsde
