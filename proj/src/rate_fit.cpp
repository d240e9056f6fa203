#include "rsde/rate_fit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rsde {

double RateFit::constant() const { return std::exp(intercept); }

RateFit fit_rate(std::span<const double> abscissae, std::span<const double> errors, std::string label) {
    if (abscissae.size() != errors.size()) throw std::invalid_argument("fit_rate: size mismatch");
    RateFit fit;
    fit.label = std::move(label);
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        const double a = abscissae[i];
        const double e = errors[i];
        if (!(a > 0.0) || !(e > 0.0) || !std::isfinite(a) || !std::isfinite(e)) {
            std::ostringstream os;
            os << "dropped point (" << a << ", " << e << "): non-positive or non-finite";
            fit.warnings.push_back(os.str());
            continue;
        }
        fit.abscissae.push_back(a);
        fit.errors.push_back(e);
        lx.push_back(std::log(a));
        ly.push_back(std::log(e));
    }
    if (lx.size() < 3) {
        throw std::invalid_argument("fit_rate: need at least 3 positive points, have " +
                                    std::to_string(lx.size()));
    }
    const double n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_rate: abscissae are all equal");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
    return fit;
}

}  // namespace rsde
