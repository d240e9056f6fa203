#include "rsde/studies.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>

#include "rsde/reflect.hpp"
#include "rsde/stratonovich.hpp"

namespace rsde {

namespace {

std::string fmt(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string cell(std::initializer_list<std::pair<const char*, double>> parts) {
    std::string out;
    for (const auto& [k, v] : parts) {
        if (!out.empty()) out += ';';
        out += k;
        out += '=';
        out += fmt(v);
    }
    return out;
}

/// Hands out consecutive statistic columns.
struct Columns {
    std::size_t next = 0;
    std::size_t take(std::size_t n = 1) {
        const std::size_t c = next;
        next += n;
        return c;
    }
};

GridPtr fine_grid(const CommonSettings& c) {
    return std::make_shared<const TimeGrid>(make_fine_grid(c.n_fine));
}

std::vector<Partition> dyadic_partitions(const std::vector<int>& levels, const GridPtr& g) {
    std::vector<Partition> out;
    out.reserve(levels.size());
    for (int l : levels) out.push_back(make_dyadic_partition(l, g));
    return out;
}

double sup_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// max over partition knots t <= 1 of |S_pi(t) - I(t)|, I given on the fine grid.
double sup_partition_error(const RiemannSumResult& s, const Partition& pi, std::span<const double> ref) {
    double acc = 0.0;
    double m = std::abs(ref[pi.fine_index(0)]);
    for (std::size_t k = 0; k < s.per_interval_terms.size(); ++k) {
        acc += s.per_interval_terms[k];
        m = std::max(m, std::abs(acc - ref[pi.fine_index(k + 1)]));
    }
    return m;
}

bool negligible(std::span<const double> errors) {
    return std::all_of(errors.begin(), errors.end(), [](double e) { return std::abs(e) <= kNegligible; });
}

double band_for(const CommonSettings& c) {
    const double k = c.band_constant >= 0.0 ? c.band_constant : 3.0 * sup_abs_sigma(c.sigma, LatticeRange{});
    return k * std::sqrt(1.0 / static_cast<double>(c.n_fine));
}

class Builder {
public:
    Builder(std::string name, const StudyConfig& cfg) {
        r_.name = std::move(name);
        r_.config_echo = cfg.common.config_echo;
        r_.seed = cfg.common.seed;
        common_ = &cfg.common;
    }

    SampleMatrix sample(std::size_t n_stats, const PathKernel& kernel) const {
        return mc_sample(common_->n_paths, common_->seed, n_stats, kernel, common_->workers);
    }

    const MomentEstimate& estimate(const SampleMatrix& s, std::size_t col, double p, std::string label,
                                   std::string cell_text) {
        const auto v = s.column(col);
        r_.estimates.push_back(summarize(v, p, common_->seed, std::move(label), std::move(cell_text)));
        return r_.estimates.back();
    }

    /// Fits unless every error is negligible, in which case a note is left and
    /// nullopt returned: the constant-sigma short-circuit.
    std::optional<RateFit> fit(std::span<const double> abscissae, std::span<const double> errors,
                               const std::string& label) {
        if (negligible(errors)) {
            note(label + ": all errors <= " + fmt(kNegligible) + ", treated as exactly zero");
            return std::nullopt;
        }
        r_.fits.push_back(fit_rate(abscissae, errors, label));
        return r_.fits.back();
    }

    void check(std::string name, double value, std::string relation, double threshold,
               std::string note_text = {}) {
        bool ok = false;
        if (relation == ">=") ok = value >= threshold;
        else if (relation == "<=") ok = value <= threshold;
        else if (relation == ">") ok = value > threshold;
        else if (relation == "<") ok = value < threshold;
        else throw std::logic_error("unknown relation " + relation);
        r_.checks.push_back(Check{std::move(name), value, std::move(relation), threshold, ok, std::move(note_text)});
    }

    void pass_trivially(std::string name, std::string relation, double threshold, std::string why) {
        r_.checks.push_back(Check{std::move(name), 0.0, std::move(relation), threshold, true, std::move(why)});
    }

    /// Slope and r^2 checks for an optional fit; zero errors pass.
    void slope_checks(const std::optional<RateFit>& f, const std::string& label, double min_slope,
                      std::optional<double> max_slope, std::optional<double> min_r2) {
        if (!f) {
            pass_trivially(label + ".slope", ">=", min_slope, "errors identically zero");
            if (max_slope) pass_trivially(label + ".slope", "<=", *max_slope, "errors identically zero");
            if (min_r2) pass_trivially(label + ".r2", ">=", *min_r2, "errors identically zero");
            return;
        }
        check(label + ".slope", f->slope, ">=", min_slope);
        if (max_slope) check(label + ".slope", f->slope, "<=", *max_slope);
        if (min_r2) check(label + ".r2", f->r_squared, ">=", *min_r2);
    }

    void record_fit(RateFit f) { r_.fits.push_back(std::move(f)); }

    void note(std::string text) { r_.notes.push_back(std::move(text)); }
    StudyReport take() { return std::move(r_); }

private:
    StudyReport r_;
    const CommonSettings* common_ = nullptr;
};

std::vector<double> gaps_from_log2(const std::vector<int>& logs) {
    std::vector<double> g;
    g.reserve(logs.size());
    for (int k : logs) g.push_back(std::ldexp(1.0, -k));
    return g;
}

std::vector<double> meshes(const std::vector<Partition>& parts) {
    std::vector<double> m;
    for (const auto& p : parts) m.push_back(p.mesh());
    return m;
}

bool sigma_is_zero(const CoefficientSet& c) { return c.is_constant() && c.param() == 0.0; }

BrownianKey independent_key(BrownianKey k) {
    return BrownianKey{k.seed ^ 0x9e3779b97f4a7c15ULL, k.path_index};
}

}  // namespace

bool StudyReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const MomentEstimate* StudyReport::find_estimate(const std::string& label, const std::string& cell_text) const {
    for (const auto& e : estimates) {
        if (e.label == label && e.cell == cell_text) return &e;
    }
    return nullptr;
}

const RateFit* StudyReport::find_fit(const std::string& label) const {
    for (const auto& f : fits) {
        if (f.label == label) return &f;
    }
    return nullptr;
}

StudyReport study_spatial_regularity(const StudyConfig& cfg) {
    const auto& c = cfg.common;
    const auto& s = cfg.spatial;
    Builder out("spatial", cfg);
    const GridPtr grid = fine_grid(c);
    const auto gaps = gaps_from_log2(s.gaps_log2);
    const std::size_t ng = gaps.size();
    const std::size_t nx = s.growth_points.size();

    // Batch layout: base, base + gap_j, growth points.
    std::vector<double> x0s{s.base};
    for (double g : gaps) x0s.push_back(s.base + g);
    for (double x : s.growth_points) x0s.push_back(x);

    Columns cols;
    const std::size_t col_x = cols.take(ng);
    const std::size_t col_l = cols.take(ng);
    const std::size_t col_growth = cols.take(nx);
    const std::size_t col_indep = cols.take();

    const auto samples = out.sample(cols.next, [&](BrownianKey key, std::span<double> row) {
        const BrownianPath b = sample_brownian(key, grid);
        const auto paths = solve_reflected_batch(x0s, c.sigma, b);
        const ReflectedPath& base = paths[0];
        for (std::size_t j = 0; j < ng; ++j) {
            row[col_x + j] = sup_abs_diff(base.X, paths[1 + j].X);
            row[col_l + j] = sup_abs_diff(base.L, paths[1 + j].L);
        }
        for (std::size_t i = 0; i < nx; ++i) {
            const auto& X = paths[1 + ng + i].X;
            row[col_growth + i] = 1.0 + *std::max_element(X.begin(), X.end());
        }
        // Same smallest gap, the second point driven by independent noise.
        const BrownianPath b2 = sample_brownian(independent_key(key), grid);
        const ReflectedPath other = solve_reflected(s.base + gaps.back(), c.sigma, b2);
        row[col_indep] = sup_abs_diff(base.X, other.X);
    });

    const double q = c.moment;
    std::vector<double> ex, el, eg, ax;
    for (std::size_t j = 0; j < ng; ++j) {
        ex.push_back(out.estimate(samples, col_x + j, q, "sup_dX", cell({{"x", s.base}, {"gap", gaps[j]}})).norm());
        el.push_back(out.estimate(samples, col_l + j, q, "sup_dL", cell({{"x", s.base}, {"gap", gaps[j]}})).norm());
    }
    for (std::size_t i = 0; i < nx; ++i) {
        const std::string where = cell({{"x", s.growth_points[i]}});
        eg.push_back(out.estimate(samples, col_growth + i, q, "one_plus_sup_X", where).norm());
        ax.push_back(1.0 + s.growth_points[i]);
    }
    const double indep =
        out.estimate(samples, col_indep, q, "sup_dX_independent", cell({{"x", s.base}, {"gap", gaps.back()}})).norm();

    const auto fx = out.fit(gaps, ex, "sup_dX_vs_gap");
    const auto fl = out.fit(gaps, el, "sup_dL_vs_gap");
    out.slope_checks(fx, "sup_dX_vs_gap", s.min_slope, std::nullopt, s.min_r2);
    out.slope_checks(fl, "sup_dL_vs_gap", s.min_slope, std::nullopt, s.min_r2);

    if (nx >= 3) {
        // 1 + sup X >= 1, so the fit is always defined.
        const auto fg = fit_rate(ax, eg, "one_plus_sup_X_vs_1_plus_x");
        out.record_fit(fg);
        out.check("one_plus_sup_X_vs_1_plus_x.slope", fg.slope, "<=", s.max_growth_slope);
    } else {
        out.note("growth check skipped: fewer than 3 growth points");
    }

    if (sigma_is_zero(c.sigma)) {
        out.pass_trivially("independent_over_paired", ">", 1.0, "sigma = 0: noise has no effect");
    } else {
        out.check("independent_over_paired", ex.back() > 0.0 ? indep / ex.back() : INFINITY, ">", 1.0,
                  "independent noise must increase the smallest-gap difference");
    }
    return out.take();
}

StudyReport study_time_regularity(const StudyConfig& cfg) {
    const auto& c = cfg.common;
    const auto& ts = cfg.time;
    Builder out("time", cfg);
    const GridPtr grid = fine_grid(c);
    const auto gaps = gaps_from_log2(ts.gaps_log2);
    const std::size_t i_s = grid->find_knot(ts.s);
    if (i_s == TimeGrid::npos) throw std::invalid_argument("time study: s is not a fine-grid knot");
    std::vector<std::size_t> i_t;
    for (double g : gaps) {
        const std::size_t i = grid->find_knot(ts.s + g);
        if (i == TimeGrid::npos) throw std::invalid_argument("time study: s + gap is not a fine-grid knot");
        i_t.push_back(i);
    }
    const std::size_t ng = gaps.size();

    const auto samples = out.sample(2 * ng, [&](BrownianKey key, std::span<double> row) {
        const BrownianPath b = sample_brownian(key, grid);
        const ReflectedPath rp = solve_reflected(c.x0, c.sigma, b);
        for (std::size_t j = 0; j < ng; ++j) {
            row[j] = rp.X[i_t[j]] - rp.X[i_s];
            row[ng + j] = rp.L[i_t[j]] - rp.L[i_s];
        }
    });

    std::vector<double> ex, el;
    for (std::size_t j = 0; j < ng; ++j) {
        const std::string where = cell({{"x", c.x0}, {"s", ts.s}, {"gap", gaps[j]}});
        ex.push_back(out.estimate(samples, j, c.moment, "dX", where).norm());
        el.push_back(out.estimate(samples, ng + j, c.moment, "dL", where).norm());
    }
    const auto fx = out.fit(gaps, ex, "dX_vs_gap");
    out.slope_checks(fx, "dX_vs_gap", ts.min_slope, ts.max_slope, ts.min_r2);
    if (negligible(el)) out.note("dL_vs_gap: local time increments identically zero");
    else out.fit(gaps, el, "dL_vs_gap");
    return out.take();
}

StudyReport study_riemann_convergence(const StudyConfig& cfg) {
    const auto& c = cfg.common;
    const auto& rs = cfg.riemann;
    Builder out("riemann", cfg);
    const GridPtr grid = fine_grid(c);
    const auto parts = dyadic_partitions(c.levels, grid);
    const std::size_t nl = parts.size();
    const std::size_t nx = rs.x_values.size();

    Columns cols;
    const std::size_t col_err = cols.take(nx * nl);
    const std::size_t col_sup = cols.take(nx * nl);
    const std::size_t col_a4 = cols.take(nx * nl);

    const auto samples = out.sample(cols.next, [&](BrownianKey key, std::span<double> row) {
        const BrownianPath b = sample_brownian(key, grid);
        const auto paths = solve_reflected_batch(rs.x_values, c.sigma, b);
        std::vector<std::vector<double>> inc;
        for (const auto& p : parts) inc.push_back(coarse_increments(b, p));
        for (std::size_t i = 0; i < nx; ++i) {
            const ReflectedPath& rp = paths[i];
            const auto ref = reference_integral_path(rp, b);
            const auto dec = decompose_error(rp, c.sigma, b, parts);
            for (std::size_t l = 0; l < nl; ++l) {
                const auto s = riemann_sum(rp.sigma, parts[l], inc[l]);
                row[col_err + i * nl + l] = s.value - ref.back();
                row[col_sup + i * nl + l] = sup_partition_error(s, parts[l], ref);
                row[col_a4 + i * nl + l] = dec[l].a4;
            }
        }
    });

    const auto mesh = meshes(parts);
    for (std::size_t i = 0; i < nx; ++i) {
        const double x = rs.x_values[i];
        std::vector<double> err, sup;
        for (std::size_t l = 0; l < nl; ++l) {
            const std::string where = cell({{"x", x}, {"level", static_cast<double>(c.levels[l])}});
            const double e = out.estimate(samples, col_err + i * nl + l, c.moment, "S_minus_I", where).norm();
            sup.push_back(out.estimate(samples, col_sup + i * nl + l, c.moment, "sup_t_S_minus_I", where).norm());
            const double a4 = out.estimate(samples, col_a4 + i * nl + l, c.moment, "a4", where).norm();
            err.push_back(e);
            out.note("a4 share x=" + fmt(x) + " level=" + std::to_string(c.levels[l]) + ": " +
                     (e > 0.0 ? fmt(a4 / e) : std::string("n/a")));
        }
        const std::string label = "S_minus_I_vs_mesh[x=" + fmt(x) + "]";
        out.slope_checks(out.fit(mesh, err, label), label, rs.min_slope, std::nullopt, std::nullopt);
        // Reported, not thresholded.
        out.fit(mesh, sup, "sup_t_S_minus_I_vs_mesh[x=" + fmt(x) + "]");
    }
    return out.take();
}

StudyReport study_two_point_riemann(const StudyConfig& cfg) {
    const auto& c = cfg.common;
    const auto& tp = cfg.two_point;
    Builder out("two_point", cfg);
    const GridPtr grid = fine_grid(c);
    const auto parts = dyadic_partitions(tp.levels, grid);
    const auto gaps = gaps_from_log2(tp.gaps_log2);
    const std::size_t nl = parts.size();
    const std::size_t ng = gaps.size();

    std::vector<double> x0s{tp.base};
    for (double g : gaps) x0s.push_back(tp.base + g);

    Columns cols;
    const std::size_t col_s = cols.take(ng * nl);
    const std::size_t col_i = cols.take(ng);

    const auto samples = out.sample(cols.next, [&](BrownianKey key, std::span<double> row) {
        const BrownianPath b = sample_brownian(key, grid);
        const auto paths = solve_reflected_batch(x0s, c.sigma, b);
        std::vector<std::vector<double>> inc;
        for (const auto& p : parts) inc.push_back(coarse_increments(b, p));
        std::vector<std::vector<double>> base_partials;
        for (std::size_t l = 0; l < nl; ++l) {
            base_partials.push_back(riemann_sum(paths[0].sigma, parts[l], inc[l]).partial_sums());
        }
        const auto base_ref = reference_integral_path(paths[0], b);
        for (std::size_t j = 0; j < ng; ++j) {
            const ReflectedPath& rp = paths[1 + j];
            for (std::size_t l = 0; l < nl; ++l) {
                const auto ps = riemann_sum(rp.sigma, parts[l], inc[l]).partial_sums();
                row[col_s + j * nl + l] = sup_abs_diff(base_partials[l], ps);
            }
            row[col_i + j] = sup_abs_diff(base_ref, reference_integral_path(rp, b));
        }
    });

    std::vector<double> constants;
    for (std::size_t l = 0; l < nl; ++l) {
        std::vector<double> err;
        for (std::size_t j = 0; j < ng; ++j) {
            const std::string where =
                cell({{"x", tp.base}, {"gap", gaps[j]}, {"level", static_cast<double>(tp.levels[l])}});
            err.push_back(out.estimate(samples, col_s + j * nl + l, c.moment, "sup_dS", where).norm());
        }
        const std::string label = "sup_dS_vs_gap[level=" + std::to_string(tp.levels[l]) + "]";
        const auto f = out.fit(gaps, err, label);
        out.slope_checks(f, label, tp.min_slope, std::nullopt, std::nullopt);
        if (f) constants.push_back(f->constant());
    }
    if (constants.size() == nl && !constants.empty()) {
        const auto [lo, hi] = std::minmax_element(constants.begin(), constants.end());
        out.check("constant_spread", *hi / *lo, "<=", tp.max_constant_spread,
                  "max over levels of the fitted constant divided by the min");
    } else {
        out.pass_trivially("constant_spread", "<=", tp.max_constant_spread, "Riemann-sum differences identically zero");
    }

    std::vector<double> ei;
    for (std::size_t j = 0; j < ng; ++j) {
        ei.push_back(out.estimate(samples, col_i + j, c.moment, "sup_dI", cell({{"x", tp.base}, {"gap", gaps[j]}})).norm());
    }
    out.slope_checks(out.fit(gaps, ei, "sup_dI_vs_gap"), "sup_dI_vs_gap", tp.min_i_slope, std::nullopt,
                     std::nullopt);
    return out.take();
}

namespace {

/// Solves a lattice in chunks and hands each path to `visit`, keeping at most
/// `chunk` paths alive.
template <class Visit>
void for_each_lattice_path(const Lattice& lat, const CoefficientSet& c, const BrownianPath& b, Visit&& visit) {
    constexpr std::size_t chunk = 16;
    std::vector<double> x0s;
    for (std::size_t start = 0; start < lat.count; start += chunk) {
        const std::size_t end = std::min(lat.count, start + chunk);
        x0s.clear();
        for (std::size_t i = start; i < end; ++i) x0s.push_back(lat.point(i));
        auto paths = solve_reflected_batch(x0s, c, b);
        for (std::size_t i = start; i < end; ++i) visit(i, paths[i - start]);
    }
}

/// Trend (positive slope against the mesh) and final/initial ratio checks.
void check_decreasing(Builder& out, const std::vector<Partition>& parts, const std::vector<double>& values,
                      const std::string& label, double max_ratio) {
    const auto fit = out.fit(meshes(parts), values, label);
    if (!fit) {
        out.pass_trivially(label + ".slope", ">", 0.0, "errors identically zero");
        out.pass_trivially(label + ".final_over_initial", "<=", max_ratio, "errors identically zero");
        return;
    }
    out.check(label + ".slope", fit->slope, ">", 0.0, "decrease in trend as the mesh shrinks");
    out.check(label + ".final_over_initial", values.back() / values.front(), "<=", max_ratio);
}

}  // namespace

StudyReport study_uniform_convergence(const StudyConfig& cfg) {
    const auto& c = cfg.common;
    Builder out("uniform", cfg);
    const GridPtr grid = fine_grid(c);
    const auto parts = dyadic_partitions(c.levels, grid);
    const std::size_t nl = parts.size();
    const Lattice lat = Lattice::covering(c.lattice_max, c.lattice_step);

    const auto samples = out.sample(nl, [&](BrownianKey key, std::span<double> row) {
        const BrownianPath b = sample_brownian(key, grid);
        std::vector<std::vector<double>> inc;
        for (const auto& p : parts) inc.push_back(coarse_increments(b, p));
        std::fill(row.begin(), row.end(), 0.0);
        for_each_lattice_path(lat, c.sigma, b, [&](std::size_t, const ReflectedPath& rp) {
            const auto ref = reference_integral_path(rp, b);
            for (std::size_t l = 0; l < nl; ++l) {
                const double e = std::abs(riemann_sum(rp.sigma, parts[l], inc[l]).value - ref.back());
                row[l] = std::max(row[l], e);
            }
        });
    });

    // Thresholds apply to the raw moment E[max_x |S - I|^q], not its root.
    std::vector<double> values;
    for (std::size_t l = 0; l < nl; ++l) {
        const std::string where = cell({{"R", c.lattice_max}, {"dx", c.lattice_step},
                                        {"level", static_cast<double>(c.levels[l])}});
        values.push_back(out.estimate(samples, l, c.moment, "max_x_S_minus_I", where).value);
    }
    check_decreasing(out, parts, values, "max_x_S_minus_I_vs_mesh", cfg.uniform.max_ratio);
    return out.take();
}

StudyReport study_substitution(const StudyConfig& cfg) {
    const auto& c = cfg.common;
    const auto& ss = cfg.substitution;
    Builder out("substitution", cfg);
    const GridPtr grid = fine_grid(c);
    const auto parts = dyadic_partitions(c.levels, grid);
    const std::size_t nl = parts.size();
    const double M = c.lattice_max;
    const double band = band_for(c);

    // Spacing list: the study lattice first, then the agreement spacings.
    std::vector<double> spacings{c.lattice_step};
    const auto dxs = gaps_from_log2(ss.dx_log2);
    spacings.insert(spacings.end(), dxs.begin(), dxs.end());
    const std::size_t nd = dxs.size();
    for (double dx : spacings) (void)Lattice::covering(M, dx);

    Columns cols;
    const std::size_t col_err = cols.take(nl);
    const std::size_t col_agree = cols.take(nd);
    const std::size_t col_leak = cols.take();
    const std::size_t col_l1 = cols.take();
    const std::size_t col_trunc = cols.take();
    const std::size_t col_z = cols.take();

    const auto samples = out.sample(cols.next, [&](BrownianKey key, std::span<double> row) {
        const BrownianPath b = sample_brownian(key, grid);
        double z = 0.0;
        switch (ss.z) {
            case ZKind::abs_b1: z = std::abs(b.terminal()); break;
            case ZKind::sup_b: {
                const auto v = b.values();
                z = *std::max_element(v.begin(), v.end());
                break;
            }
            case ZKind::pos_b1_capped: z = std::min(std::max(b.terminal(), 0.0), M); break;
            case ZKind::constant: z = ss.z_value; break;
        }
        row[col_trunc] = z > M ? 1.0 : 0.0;
        z = std::min(z, M);
        row[col_z] = z;

        // One batch: the direct solve, then a bracketing pair per spacing.
        std::vector<double> x0s{z};
        std::vector<Lattice> brackets;
        for (double dx : spacings) {
            const auto cells = static_cast<std::size_t>(std::llround(M / dx));
            const std::size_t k = std::min(static_cast<std::size_t>(std::floor(z / dx)), cells - 1);
            brackets.push_back(Lattice{static_cast<double>(k) * dx, dx, 2});
            x0s.push_back(brackets.back().point(0));
            x0s.push_back(brackets.back().point(1));
        }
        auto paths = solve_reflected_batch(x0s, c.sigma, b);
        const ReflectedPath& direct = paths[0];

        std::vector<FlowField> flows;
        for (std::size_t d = 0; d < spacings.size(); ++d) {
            flows.push_back(FlowField{brackets[d], b.key(), {paths[1 + 2 * d], paths[2 + 2 * d]}});
        }

        // (i) on the study lattice: interpolated path, interpolated reference.
        const FlowField& f = flows[0];
        const ReflectedPath zp = evaluate_flow_at(f, z, c.sigma);
        const double w = (z - f.lattice.point(0)) / (f.lattice.point(1) - f.lattice.point(0));
        const auto ref_a = reference_integral_path(f.paths[0], b);
        const auto ref_b = reference_integral_path(f.paths[1], b);
        std::vector<double> ref_z(ref_a.size());
        for (std::size_t i = 0; i < ref_z.size(); ++i) ref_z[i] = (1.0 - w) * ref_a[i] + w * ref_b[i];
        for (std::size_t l = 0; l < nl; ++l) {
            const auto s = riemann_sum(zp.sigma, parts[l], b);
            row[col_err + l] = sup_partition_error(s, parts[l], ref_z);
        }

        // (ii) flow-evaluated vs direct, per spacing.
        for (std::size_t d = 0; d < nd; ++d) {
            const ReflectedPath fp = evaluate_flow_at(flows[1 + d], z, c.sigma);
            row[col_agree + d] = sup_abs_diff(fp.X, direct.X);
        }

        // (iii) local time charged while the pre-step state sits above the band.
        double leak = 0.0;
        for (std::size_t i = 0; i + 1 < zp.size(); ++i) {
            if (zp.X[i] > band) leak += zp.local_time_increment(i);
        }
        row[col_leak] = leak;
        row[col_l1] = zp.L.back();
    });

    std::vector<double> err;
    for (std::size_t l = 0; l < nl; ++l) {
        const std::string where = cell({{"dx", c.lattice_step}, {"level", static_cast<double>(c.levels[l])}});
        err.push_back(out.estimate(samples, col_err + l, 1.0, "max_t_S_minus_I_at_Z", where).value);
    }
    check_decreasing(out, parts, err, "max_t_S_minus_I_at_Z_vs_mesh", ss.max_ratio);

    std::vector<double> agree;
    for (std::size_t d = 0; d < nd; ++d) {
        agree.push_back(out.estimate(samples, col_agree + d, 1.0, "sup_flow_minus_direct", cell({{"dx", dxs[d]}})).value);
    }
    const auto fa = out.fit(dxs, agree, "sup_flow_minus_direct_vs_dx");
    out.slope_checks(fa, "sup_flow_minus_direct_vs_dx", ss.min_dx_slope, std::nullopt, std::nullopt);
    if (fa) {
        double cmax = 0.0;
        for (std::size_t d = 0; d < nd; ++d) cmax = std::max(cmax, agree[d] / dxs[d]);
        out.note("flow-vs-direct constant max_dx E sup / dx = " + fmt(cmax));
    }

    const auto& leak = out.estimate(samples, col_leak, 0.0, "band_leakage", cell({{"band", band}}));
    const auto& l1 = out.estimate(samples, col_l1, 0.0, "L1", cell({}));
    if (l1.value > 0.0) {
        out.check("band_leakage_over_L1", leak.value / l1.value, "<=", ss.max_leakage,
                  "E[sum of dL with pre-step X > band] / E[L_1]");
    } else {
        out.pass_trivially("band_leakage_over_L1", "<=", ss.max_leakage, "no local time accumulated");
    }

    const auto& trunc = out.estimate(samples, col_trunc, 0.0, "truncated_fraction", cell({{"M", M}}));
    out.estimate(samples, col_z, 0.0, "Z", cell({}));
    out.note("Z = " + z_kind_name(ss.z) + ", truncated at M = " + fmt(M) + " on " +
             std::to_string(static_cast<std::size_t>(std::llround(trunc.value * static_cast<double>(trunc.n_paths)))) +
             " of " + std::to_string(trunc.n_paths) + " paths");
    return out.take();
}

std::vector<std::string> study_names() {
    return {"spatial", "time", "riemann", "two_point", "uniform", "substitution"};
}

StudyReport run_study(const std::string& name, const StudyConfig& cfg) {
    if (name == "spatial") return study_spatial_regularity(cfg);
    if (name == "time") return study_time_regularity(cfg);
    if (name == "riemann") return study_riemann_convergence(cfg);
    if (name == "two_point") return study_two_point_riemann(cfg);
    if (name == "uniform") return study_uniform_convergence(cfg);
    if (name == "substitution") return study_substitution(cfg);
    throw std::invalid_argument("unknown study '" + name + "'");
}

ZKind parse_z_kind(const std::string& name) {
    if (name == "abs_b1") return ZKind::abs_b1;
    if (name == "sup_b") return ZKind::sup_b;
    if (name == "pos_b1_capped") return ZKind::pos_b1_capped;
    if (name == "constant") return ZKind::constant;
    throw std::invalid_argument("unknown Z kind '" + name + "' (abs_b1, sup_b, pos_b1_capped, constant)");
}

std::string z_kind_name(ZKind z) {
    switch (z) {
        case ZKind::abs_b1: return "abs_b1";
        case ZKind::sup_b: return "sup_b";
        case ZKind::pos_b1_capped: return "pos_b1_capped";
        case ZKind::constant: return "constant";
    }
    return "?";
}

}  // namespace rsde
