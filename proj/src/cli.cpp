#include "rsde/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rsde/config.hpp"
#include "rsde/paths.hpp"
#include "rsde/reflect.hpp"
#include "rsde/report.hpp"
#include "rsde/skorohod.hpp"
#include "rsde/stratonovich.hpp"
#include "rsde/studies.hpp"

namespace rsde {

namespace {

/// Errors in user input: reported with exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct Options {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string input;
    std::string output;
    std::string output_dir;
    std::string study;
    std::uint64_t path_index = 0;
};

RunConfig load_config(const Options& o) {
    std::string text = o.config_path.empty() ? std::string() : read_file(o.config_path);
    try {
        return parse_config_or_throw(with_overrides(std::move(text), o.overrides));
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
}

std::string output_dir(const Options& o, const RunConfig& rc) {
    if (!o.output_dir.empty()) return o.output_dir;
    if (const char* env = std::getenv("RSDE_OUTPUT_DIR"); env != nullptr && *env != '\0') return env;
    return rc.output_dir;
}

std::string output_path(const Options& o, const RunConfig& rc, const std::string& file) {
    if (!o.output.empty()) return o.output;
    return (std::filesystem::path(output_dir(o, rc)) / file).string();
}

/// Two-column numeric CSV (header line required).
std::pair<std::vector<double>, std::vector<double>> read_ty(const std::string& path) {
    std::istringstream in(read_file(path));
    std::string line;
    std::vector<double> t, y;
    int line_no = 0;
    bool header = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        const auto comma = line.find(',');
        double a = 0.0;
        double b = 0.0;
        try {
            if (comma == std::string::npos) throw std::invalid_argument("missing comma");
            std::size_t used = 0;
            a = std::stod(line.substr(0, comma), &used);
            b = std::stod(line.substr(comma + 1), &used);
        } catch (const std::exception&) {
            throw UsageError(path + ":" + std::to_string(line_no) + ": expected 't,y', got '" + line + "'");
        }
        t.push_back(a);
        y.push_back(b);
    }
    if (y.empty()) throw UsageError(path + ": no data rows");
    return {t, y};
}

int cmd_skorohod(const Options& o, std::ostream& out) {
    if (o.input.empty()) throw UsageError("skorohod: --input is required");
    const auto [t, y] = read_ty(o.input);
    SkorohodPair p;
    try {
        p = skorohod_map(y);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    std::ostringstream os;
    os << "t,x,k\n";
    for (std::size_t i = 0; i < y.size(); ++i) {
        os << format_double(t[i]) << ',' << format_double(p.x[i]) << ',' << format_double(p.k[i]) << '\n';
    }
    const std::string path = o.output.empty() ? "skorohod.csv" : o.output;
    write_file_atomic(path, os.str());
    out << "skorohod: " << y.size() << " knots, k_end = " << format_double(p.k.back()) << " -> " << path << '\n';
    return exit_ok;
}

int cmd_simulate(const Options& o, std::ostream& out) {
    const RunConfig rc = load_config(o);
    const auto& c = rc.study.common;
    const GridPtr grid = std::make_shared<const TimeGrid>(make_fine_grid(c.n_fine));
    const BrownianPath b = sample_brownian(BrownianKey{c.seed, o.path_index}, grid);
    const ReflectedPath rp = solve_reflected(c.x0, c.sigma, b);
    std::ostringstream os;
    os << "# format: rsde-simulate/1\n# seed: " << c.seed << "\n# path_index: " << o.path_index << '\n';
    os << "t,X,L\n";
    for (std::size_t i = 0; i < rp.size(); ++i) {
        os << format_double((*grid)[i]) << ',' << format_double(rp.X[i]) << ',' << format_double(rp.L[i]) << '\n';
    }
    const std::string path = output_path(o, rc, "simulate.csv");
    write_file_atomic(path, os.str());
    out << "simulate: sigma=" << rc.sigma_name << " x0=" << format_double(c.x0) << " n_fine=" << c.n_fine
        << " X_1=" << format_double(rp.X.back()) << " L_1=" << format_double(rp.L.back()) << " -> " << path << '\n';
    return exit_ok;
}

int cmd_decompose(const Options& o, std::ostream& out) {
    const RunConfig rc = load_config(o);
    const auto& c = rc.study.common;
    const GridPtr grid = std::make_shared<const TimeGrid>(make_fine_grid(c.n_fine));
    const BrownianPath b = sample_brownian(BrownianKey{c.seed, o.path_index}, grid);
    const ReflectedPath rp = solve_reflected(c.x0, c.sigma, b);
    std::vector<Partition> parts;
    for (int l : c.levels) parts.push_back(make_dyadic_partition(l, grid));
    const auto dec = decompose_error(rp, c.sigma, b, parts);
    std::ostringstream os;
    os << "level,mesh,a1,a2,a3,a4,sum,total,residual\n";
    for (std::size_t i = 0; i < dec.size(); ++i) {
        const auto& e = dec[i];
        os << c.levels[i] << ',' << format_double(e.mesh) << ',' << format_double(e.a1) << ','
           << format_double(e.a2) << ',' << format_double(e.a3) << ',' << format_double(e.a4) << ','
           << format_double(e.sum()) << ',' << format_double(e.total) << ',' << format_double(e.residual()) << '\n';
    }
    out << os.str();
    if (!o.output.empty()) write_file_atomic(o.output, os.str());
    return exit_ok;
}

int cmd_study(const Options& o, std::ostream& out) {
    const RunConfig rc = load_config(o);
    const auto names = study_names();
    if (std::find(names.begin(), names.end(), o.study) == names.end()) {
        throw UsageError("unknown study '" + o.study + "'");
    }
    const StudyReport r = run_study(o.study, rc.study);
    const std::filesystem::path dir(output_dir(o, rc));
    const std::string csv = (dir / (o.study + ".csv")).string();
    write_file_atomic(csv, study_csv(r));
    write_file_atomic((dir / (o.study + ".summary.json")).string(), study_summary_json(r));

    std::size_t failed = 0;
    for (const auto& ch : r.checks) failed += ch.passed ? 0 : 1;
    out << "study " << r.name << ": " << (r.passed() ? "PASS" : "FAIL") << " (" << r.checks.size() - failed << "/"
        << r.checks.size() << " checks) -> " << csv << '\n';
    return r.passed() ? exit_ok : exit_threshold_failed;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Reflected SDE simulation and Monte Carlo studies", "rsde"};
    app.require_subcommand(1);
    Options o;

    auto add_config = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "configuration file (key = value)");
        sub->add_option("--set", o.overrides, "override one key, as key=value (repeatable)");
    };

    auto* sk = app.add_subcommand("skorohod", "reflect a CSV path (t,y) to (t,x,k)");
    sk->add_option("--input", o.input, "input CSV with columns t,y")->required();
    sk->add_option("--output", o.output, "output CSV (default skorohod.csv)");

    auto* sim = app.add_subcommand("simulate", "solve one seeded path, CSV (t,X,L)");
    add_config(sim);
    sim->add_option("--path-index", o.path_index, "Brownian path index under the config seed");
    sim->add_option("--output", o.output, "output CSV (default <output-dir>/simulate.csv)");
    sim->add_option("--output-dir", o.output_dir, "output directory");

    auto* dec = app.add_subcommand("decompose", "four-term error split per partition level for one path");
    add_config(dec);
    dec->add_option("--path-index", o.path_index, "Brownian path index under the config seed");
    dec->add_option("--output", o.output, "also write the table to this CSV");

    auto* st = app.add_subcommand("study", "run a Monte Carlo study");
    st->add_option("name", o.study, "spatial, time, riemann, two_point, uniform or substitution")->required();
    add_config(st);
    st->add_option("--output-dir", o.output_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*sk) return cmd_skorohod(o, out);
        if (*sim) return cmd_simulate(o, out);
        if (*dec) return cmd_decompose(o, out);
        return cmd_study(o, out);
    } catch (const UsageError& e) {
        err << "rsde: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "rsde: error: " << e.what() << '\n';
        return exit_usage;
    }
}

}  // namespace rsde
