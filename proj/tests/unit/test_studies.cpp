#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rsde/report.hpp"
#include "rsde/studies.hpp"

using namespace rsde;

namespace {

StudyConfig small(const CoefficientSet& c) {
    StudyConfig cfg;
    cfg.common.sigma = c;
    cfg.common.n_fine = 1024;
    cfg.common.n_paths = 40;
    cfg.common.levels = {2, 3, 4};
    cfg.common.lattice_max = 1.0;
    cfg.common.lattice_step = 0.25;
    cfg.two_point.levels = {2, 4};
    cfg.time.gaps_log2 = {2, 3, 4, 5};
    cfg.spatial.gaps_log2 = {1, 2, 3, 4};
    cfg.two_point.gaps_log2 = {1, 2, 3, 4};
    cfg.substitution.dx_log2 = {1, 2, 3};
    return cfg;
}

}  // namespace

TEST_CASE("constant sigma: Riemann errors vanish and their checks pass trivially") {
    for (double c : {0.0, 1.0}) {
        const auto cfg = small(CoefficientSet::constant(c));
        for (const auto& name : study_names()) {
            CAPTURE(name);
            CAPTURE(c);
            const auto r = run_study(name, cfg);
            CHECK(!r.checks.empty());
            // With unit noise the Z path still reflects, so flow interpolation
            // and band leakage are genuine; only the S - I checks are trivial.
            if (c == 0.0 || name != "substitution") {
                CHECK(r.passed());
                continue;
            }
            for (const auto& ch : r.checks) {
                if (ch.name.rfind("max_t_S_minus_I_at_Z", 0) == 0) {
                    CHECK(ch.passed);
                    CHECK(ch.note == "errors identically zero");
                }
            }
        }
    }
}

TEST_CASE("zero sigma: exact statistics") {
    const auto cfg = small(CoefficientSet::constant(0.0));
    const auto sp = study_spatial_regularity(cfg);
    // X(x) - X(y) = x - y exactly, so the fitted slope and constant are 1.
    const auto* f = sp.find_fit("sup_dX_vs_gap");
    REQUIRE(f != nullptr);
    CHECK(f->slope == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f->constant() == doctest::Approx(1.0).epsilon(1e-12));
    const auto tm = study_time_regularity(cfg);
    for (const auto& e : tm.estimates) CHECK(e.value == 0.0);
}

TEST_CASE("unit sigma: spatial differences never exceed the gap") {
    const auto cfg = small(CoefficientSet::constant(1.0));
    const auto r = study_spatial_regularity(cfg);
    for (const auto& e : r.estimates) {
        if (e.label != "sup_dX" && e.label != "sup_dL") continue;
        const double gap = std::stod(e.cell.substr(e.cell.find("gap=") + 4));
        CHECK(e.norm() <= gap * (1.0 + 1e-12));
    }
    CHECK(r.find_fit("sup_dX_vs_gap")->slope >= 1.0 - 1e-9);
}

TEST_CASE("unit sigma far from the boundary: Gaussian time increments") {
    auto cfg = small(CoefficientSet::constant(1.0));
    cfg.common.x0 = 40.0;
    cfg.common.n_paths = 4000;
    const auto r = study_time_regularity(cfg);
    // E[(B_t - B_s)^2]^(1/2) = |t - s|^(1/2).
    for (const auto& e : r.estimates) {
        if (e.label != "dX") continue;
        const double gap = std::stod(e.cell.substr(e.cell.find("gap=") + 4));
        CHECK(std::abs(e.norm() - std::sqrt(gap)) <= 4.0 * e.norm_stderr());
    }
    const double m4 = std::pow(oracle::abs_normal_moment(4.0), 0.25);
    CHECK(m4 == doctest::Approx(std::pow(3.0, 0.25)).epsilon(1e-9));
}

TEST_CASE("a one-point lattice reduces the uniform study to the Riemann study") {
    auto cfg = small(CoefficientSet::sine());
    cfg.common.lattice_max = 0.0;
    cfg.common.lattice_step = 1.0;
    cfg.riemann.x_values = {0.0};
    const auto u = study_uniform_convergence(cfg);
    const auto r = study_riemann_convergence(cfg);
    for (int level : cfg.common.levels) {
        const auto* a = u.find_estimate("max_x_S_minus_I", "R=0;dx=1;level=" + std::to_string(level));
        const auto* b = r.find_estimate("S_minus_I", "x=0;level=" + std::to_string(level));
        REQUIRE(a != nullptr);
        REQUIRE(b != nullptr);
        CHECK(a->value == b->value);
    }
}

TEST_CASE("constant Z on a lattice point: flow and direct solves coincide") {
    auto cfg = small(CoefficientSet::sine());
    cfg.substitution.z = ZKind::constant;
    cfg.substitution.z_value = 0.5;
    const auto r = study_substitution(cfg);
    for (const auto& e : r.estimates) {
        if (e.label == "sup_flow_minus_direct") CHECK(e.value == 0.0);
    }
    for (const auto& ch : r.checks) {
        if (ch.name.rfind("sup_flow_minus_direct", 0) == 0) CHECK(ch.passed);
    }
}

TEST_CASE("truncation is counted") {
    auto cfg = small(CoefficientSet::sine());
    cfg.substitution.z = ZKind::constant;
    cfg.substitution.z_value = 3.0;  // above lattice_max = 1
    const auto r = study_substitution(cfg);
    const auto* t = r.find_estimate("truncated_fraction", "M=1");
    REQUIRE(t != nullptr);
    CHECK(t->value == 1.0);
}

TEST_CASE("reports are reproducible and worker-independent") {
    auto cfg = small(CoefficientSet::sine());
    cfg.common.workers = 1;
    const auto a = study_csv(study_two_point_riemann(cfg));
    const auto b = study_csv(study_two_point_riemann(cfg));
    cfg.common.workers = 3;
    const auto c = study_csv(study_two_point_riemann(cfg));
    CHECK(a == b);
    CHECK(a == c);
    cfg.common.seed = 2;
    CHECK(study_csv(study_two_point_riemann(cfg)) != a);
}

TEST_CASE("unknown study and Z names") {
    CHECK_THROWS(run_study("nope", StudyConfig{}));
    CHECK_THROWS(parse_z_kind("nope"));
    for (auto z : {ZKind::abs_b1, ZKind::sup_b, ZKind::pos_b1_capped, ZKind::constant}) {
        CHECK(parse_z_kind(z_kind_name(z)) == z);
    }
}

TEST_CASE("report formatting") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(format_double(NAN) == "nan");

    StudyReport r;
    r.name = "demo";
    r.seed = 9;
    r.config_echo = "seed = 9\nn_paths = 2\n";
    r.estimates.push_back(summarize(std::vector<double>{1.0, 3.0}, 1.0, 9, "stat", "x=1"));
    r.checks.push_back(Check{"c", 0.5, ">=", 0.2, true, ""});
    const auto csv = study_csv(r);
    CHECK(csv.find("# format: rsde-study/1\n") == 0);
    CHECK(csv.find("# seed: 9\n") != std::string::npos);
    CHECK(csv.find("# config: n_paths = 2\n") != std::string::npos);
    CHECK(csv.find("demo,stat,x=1,1,2,1,2,1,2,0,9\n") != std::string::npos);
    const auto json = study_summary_json(r);
    CHECK(json.find("\"passed\": true") != std::string::npos);
}
