#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rsde/coefficients.hpp"
#include "rsde/monte_carlo.hpp"
#include "rsde/rate_fit.hpp"

namespace rsde {

inline constexpr const char* kReportFormat = "rsde-study/1";

/// Settings shared by every study.
struct CommonSettings {
    CoefficientSet sigma = CoefficientSet::sine();
    std::size_t n_fine = std::size_t{1} << 16;
    std::size_t n_paths = 2000;
    std::uint64_t seed = 1;
    int workers = 1;
    /// Moment exponent q in E[|.|^q]^(1/q).
    double moment = 2.0;
    /// Dyadic partition levels.
    std::vector<int> levels = {2, 3, 4, 5, 6, 7, 8};
    double x0 = 0.0;
    /// Flow lattice covers [0, lattice_max] with spacing lattice_step.
    double lattice_max = 5.0;
    double lattice_step = 1.0 / 16.0;
    /// Complementarity band is band_constant * sqrt(h); negative selects
    /// 3 * sup |sigma| over [0, 50].
    double band_constant = -1.0;
    /// Verbatim configuration text, echoed into reports.
    std::string config_echo;
};

struct SpatialSettings {
    double base = 0.0;
    std::vector<int> gaps_log2 = {1, 2, 3, 4, 5, 6};
    std::vector<double> growth_points = {0.0, 1.0, 5.0, 20.0};
    double min_slope = 0.8;
    double min_r2 = 0.95;
    /// Upper bound on the log-log slope of E[sup X^q]^(1/q) against 1 + x.
    double max_growth_slope = 1.1;
};

struct TimeSettings {
    double s = 0.25;
    std::vector<int> gaps_log2 = {2, 3, 4, 5, 6, 7, 8};
    double min_slope = 0.4;
    double max_slope = 0.6;
    double min_r2 = 0.9;
};

struct RiemannSettings {
    std::vector<double> x_values = {0.0, 1.0, 5.0};
    double min_slope = 0.2;
};

struct TwoPointSettings {
    double base = 0.0;
    std::vector<int> gaps_log2 = {1, 2, 3, 4, 5, 6};
    std::vector<int> levels = {2, 4, 6, 8};
    double min_slope = 0.4;
    double max_constant_spread = 2.0;
    double min_i_slope = 0.8;
};

struct UniformSettings {
    double max_ratio = 0.25;
};

/// Anticipating initial value Z(omega).
enum class ZKind { abs_b1, sup_b, pos_b1_capped, constant };

struct SubstitutionSettings {
    ZKind z = ZKind::abs_b1;
    double z_value = 1.0;
    /// Lattice spacings 2^-k used for the flow-vs-direct agreement fit.
    std::vector<int> dx_log2 = {1, 2, 3, 4, 5};
    double max_ratio = 0.25;
    double min_dx_slope = 0.8;
    double max_leakage = 1e-2;
};

struct StudyConfig {
    CommonSettings common;
    SpatialSettings spatial;
    TimeSettings time;
    RiemannSettings riemann;
    TwoPointSettings two_point;
    UniformSettings uniform;
    SubstitutionSettings substitution;
};

struct Check {
    std::string name;
    double value = 0.0;
    std::string relation;
    double threshold = 0.0;
    bool passed = false;
    std::string note;
};

struct StudyReport {
    std::string name;
    std::string config_echo;
    std::uint64_t seed = 0;
    std::vector<MomentEstimate> estimates;
    std::vector<RateFit> fits;
    std::vector<Check> checks;
    std::vector<std::string> notes;

    bool passed() const;
    const MomentEstimate* find_estimate(const std::string& label, const std::string& cell) const;
    const RateFit* find_fit(const std::string& label) const;
};

StudyReport study_spatial_regularity(const StudyConfig& cfg);
StudyReport study_time_regularity(const StudyConfig& cfg);
StudyReport study_riemann_convergence(const StudyConfig& cfg);
StudyReport study_two_point_riemann(const StudyConfig& cfg);
StudyReport study_uniform_convergence(const StudyConfig& cfg);
StudyReport study_substitution(const StudyConfig& cfg);

/// Names accepted by run_study: spatial, time, riemann, two_point, uniform,
/// substitution.
std::vector<std::string> study_names();
StudyReport run_study(const std::string& name, const StudyConfig& cfg);

ZKind parse_z_kind(const std::string& name);
std::string z_kind_name(ZKind z);

/// Errors at or below this are treated as exact zeros (constant-sigma cases).
inline constexpr double kNegligible = 1e-12;

}  // namespace rsde
