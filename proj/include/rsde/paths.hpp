#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace rsde {

/// Strictly increasing knots on [0, 1], starting at 0 and ending at 1.
class TimeGrid {
public:
    explicit TimeGrid(std::vector<double> knots);

    std::size_t intervals() const { return knots_.size() - 1; }
    std::size_t size() const { return knots_.size(); }
    std::span<const double> knots() const { return knots_; }
    double operator[](std::size_t i) const { return knots_[i]; }
    double dt(std::size_t i) const { return knots_[i + 1] - knots_[i]; }
    double mesh() const;

    /// Number of intervals when the grid was built as a uniform grid, 0 otherwise.
    std::size_t uniform_intervals() const { return uniform_n_; }

    /// Index of the knot equal to t (within one rounding unit), or npos.
    std::size_t find_knot(double t) const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    friend TimeGrid make_fine_grid(std::size_t n_fine);
    std::vector<double> knots_;
    std::size_t uniform_n_ = 0;
};

using GridPtr = std::shared_ptr<const TimeGrid>;

/// Uniform grid with n_fine intervals; knot i is i / n_fine.
TimeGrid make_fine_grid(std::size_t n_fine);

/// A subset of fine-grid knots. `fine_index(k)` locates partition knot k on
/// the fine grid, which is what keeps increment aggregation exact.
class Partition {
public:
    Partition(GridPtr fine, std::vector<std::size_t> fine_indices);

    const TimeGrid& fine() const { return *fine_; }
    const GridPtr& fine_ptr() const { return fine_; }
    std::size_t intervals() const { return indices_.size() - 1; }
    std::size_t size() const { return indices_.size(); }
    std::size_t fine_index(std::size_t k) const { return indices_[k]; }
    std::span<const std::size_t> fine_indices() const { return indices_; }
    double knot(std::size_t k) const { return (*fine_)[indices_[k]]; }
    double mesh() const { return mesh_; }

    /// Partition knot index of time t, or TimeGrid::npos.
    std::size_t find_knot(double t) const;

private:
    GridPtr fine_;
    std::vector<std::size_t> indices_;
    double mesh_ = 0.0;
};

/// Dyadic partition with mesh 2^-level, nested in a uniform fine grid.
Partition make_dyadic_partition(int level, const GridPtr& fine);

/// Partition from explicit times; every time must be a fine-grid knot.
Partition make_partition(std::span<const double> times, const GridPtr& fine);

struct BrownianKey {
    std::uint64_t seed = 0;
    std::uint64_t path_index = 0;
    friend bool operator==(const BrownianKey&, const BrownianKey&) = default;
};

/// Brownian motion on a fine grid. Increments live on a 2^-40 lattice so
/// every partial sum of them is exact in double precision: aggregation to any
/// nested partition telescopes bit-exactly.
class BrownianPath {
public:
    BrownianPath(GridPtr grid, std::vector<double> increments, BrownianKey key);

    const TimeGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    BrownianKey key() const { return key_; }
    std::span<const double> values() const { return values_; }
    std::span<const double> increments() const { return increments_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double terminal() const { return values_.back(); }

private:
    GridPtr grid_;
    std::vector<double> increments_;
    std::vector<double> values_;
    BrownianKey key_;
};

/// 64-bit stream key derived from (seed, path_index).
std::uint64_t stream_key(BrownianKey key);

/// Deterministic in (key, grid); independent of any other path.
BrownianPath sample_brownian(BrownianKey key, const GridPtr& grid);

/// Increments of b over the intervals of pi (exact sums of fine increments).
std::vector<double> coarse_increments(const BrownianPath& b, const Partition& pi);

}  // namespace rsde
