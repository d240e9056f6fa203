#include "rsde/paths.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace rsde {

namespace {

// Increments are rounded to multiples of 2^-40; partial sums stay exact
// while |B| < 2^12.
constexpr double kLatticeScale = 1099511627776.0;  // 2^40
constexpr double kRoundShift = 6755399441055744.0;  // 1.5 * 2^52

double to_lattice(double v) {
    const double scaled = v * kLatticeScale;
    const double rounded = (scaled + kRoundShift) - kRoundShift;
    return rounded / kLatticeScale;
}

bool same_time(double a, double b) {
    return std::abs(a - b) <= 2.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(a));
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

TimeGrid::TimeGrid(std::vector<double> knots) : knots_(std::move(knots)) {
    if (knots_.size() < 2) {
        throw std::invalid_argument("TimeGrid needs at least two knots");
    }
    if (knots_.front() != 0.0 || knots_.back() != 1.0) {
        throw std::invalid_argument("TimeGrid must start at 0 and end at 1");
    }
    for (std::size_t i = 1; i < knots_.size(); ++i) {
        if (!(knots_[i] > knots_[i - 1])) {
            throw std::invalid_argument("TimeGrid knots must be strictly increasing (index " +
                                        std::to_string(i) + ")");
        }
    }
}

double TimeGrid::mesh() const {
    if (uniform_n_ != 0) return 1.0 / static_cast<double>(uniform_n_);
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i) m = std::max(m, dt(i));
    return m;
}

std::size_t TimeGrid::find_knot(double t) const {
    if (!(t >= 0.0 && t <= 1.0)) return npos;
    std::size_t idx;
    if (uniform_n_ != 0) {
        idx = static_cast<std::size_t>(std::llround(t * static_cast<double>(uniform_n_)));
    } else {
        auto it = std::lower_bound(knots_.begin(), knots_.end(), t);
        if (it == knots_.end()) it = std::prev(it);
        idx = static_cast<std::size_t>(it - knots_.begin());
        if (idx > 0 && std::abs(knots_[idx - 1] - t) < std::abs(knots_[idx] - t)) --idx;
    }
    return same_time(knots_[idx], t) ? idx : npos;
}

TimeGrid make_fine_grid(std::size_t n_fine) {
    if (n_fine < 2) {
        throw std::invalid_argument("fine grid needs n_fine >= 2, got " + std::to_string(n_fine));
    }
    std::vector<double> knots(n_fine + 1);
    const double n = static_cast<double>(n_fine);
    for (std::size_t i = 0; i <= n_fine; ++i) knots[i] = static_cast<double>(i) / n;
    TimeGrid grid(std::move(knots));
    grid.uniform_n_ = n_fine;
    return grid;
}

Partition::Partition(GridPtr fine, std::vector<std::size_t> fine_indices)
    : fine_(std::move(fine)), indices_(std::move(fine_indices)) {
    if (!fine_) throw std::invalid_argument("Partition needs a fine grid");
    if (indices_.size() < 2 || indices_.front() != 0 || indices_.back() != fine_->intervals()) {
        throw std::invalid_argument("Partition must span the fine grid from 0 to 1");
    }
    for (std::size_t k = 1; k < indices_.size(); ++k) {
        if (indices_[k] <= indices_[k - 1]) {
            throw std::invalid_argument("Partition knots must be strictly increasing");
        }
        mesh_ = std::max(mesh_, knot(k) - knot(k - 1));
    }
}

std::size_t Partition::find_knot(double t) const {
    const std::size_t fi = fine_->find_knot(t);
    if (fi == TimeGrid::npos) return TimeGrid::npos;
    auto it = std::lower_bound(indices_.begin(), indices_.end(), fi);
    if (it == indices_.end() || *it != fi) return TimeGrid::npos;
    return static_cast<std::size_t>(it - indices_.begin());
}

Partition make_dyadic_partition(int level, const GridPtr& fine) {
    if (!fine) throw std::invalid_argument("make_dyadic_partition: null fine grid");
    const std::size_t n_fine = fine->uniform_intervals();
    if (n_fine == 0) {
        throw std::invalid_argument("make_dyadic_partition: fine grid is not uniform");
    }
    if (level < 0 || level >= 63 || n_fine % (std::size_t{1} << level) != 0) {
        throw std::invalid_argument("dyadic level " + std::to_string(level) + " (2^" +
                                    std::to_string(level) + " intervals) does not divide n_fine = " +
                                    std::to_string(n_fine));
    }
    const std::size_t n = std::size_t{1} << level;
    const std::size_t stride = n_fine / n;
    std::vector<std::size_t> idx(n + 1);
    for (std::size_t k = 0; k <= n; ++k) idx[k] = k * stride;
    return Partition(fine, std::move(idx));
}

Partition make_partition(std::span<const double> times, const GridPtr& fine) {
    if (!fine) throw std::invalid_argument("make_partition: null fine grid");
    std::vector<std::size_t> idx;
    idx.reserve(times.size());
    for (double t : times) {
        const std::size_t fi = fine->find_knot(t);
        if (fi == TimeGrid::npos) {
            throw std::invalid_argument("partition knot " + std::to_string(t) +
                                        " is not a fine-grid knot");
        }
        idx.push_back(fi);
    }
    return Partition(fine, std::move(idx));
}

BrownianPath::BrownianPath(GridPtr grid, std::vector<double> increments, BrownianKey key)
    : grid_(std::move(grid)), increments_(std::move(increments)), key_(key) {
    if (!grid_ || increments_.size() != grid_->intervals()) {
        throw std::invalid_argument("BrownianPath: increment count does not match grid");
    }
    values_.resize(increments_.size() + 1);
    values_[0] = 0.0;
    for (std::size_t i = 0; i < increments_.size(); ++i) values_[i + 1] = values_[i] + increments_[i];
}

std::uint64_t stream_key(BrownianKey key) {
    return splitmix64(splitmix64(key.seed) ^ (key.path_index * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL));
}

BrownianPath sample_brownian(BrownianKey key, const GridPtr& grid) {
    if (!grid) throw std::invalid_argument("sample_brownian: null grid");
    std::mt19937_64 engine(stream_key(key));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> inc(grid->intervals());
    const bool uniform = grid->uniform_intervals() != 0;
    const double sqrt_h = std::sqrt(grid->mesh());
    for (std::size_t i = 0; i < inc.size(); ++i) {
        const double scale = uniform ? sqrt_h : std::sqrt(grid->dt(i));
        inc[i] = to_lattice(normal(engine) * scale);
    }
    return BrownianPath(grid, std::move(inc), key);
}

std::vector<double> coarse_increments(const BrownianPath& b, const Partition& pi) {
    if (pi.fine_ptr() != b.grid_ptr() &&
        !std::ranges::equal(pi.fine().knots(), b.grid().knots())) {
        throw std::invalid_argument("coarse_increments: partition is not nested in the path's grid");
    }
    std::vector<double> out(pi.intervals());
    const auto inc = b.increments();
    for (std::size_t k = 0; k < out.size(); ++k) {
        double s = 0.0;
        for (std::size_t j = pi.fine_index(k); j < pi.fine_index(k + 1); ++j) s += inc[j];
        out[k] = s;
    }
    return out;
}

}  // namespace rsde
