#include "rsde/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

namespace rsde {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Drops a trailing comment that is not inside double quotes.
std::string_view strip_comment(std::string_view s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        else if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

struct Value {
    std::string raw;
    int line = 0;
};

std::string unquote(std::string_view v) {
    v = trim(v);
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return std::string(v.substr(1, v.size() - 2));
    return std::string(v);
}

std::vector<std::string> split_list(std::string_view v) {
    v = trim(v);
    if (v.size() >= 2 && v.front() == '[' && v.back() == ']') v = v.substr(1, v.size() - 2);
    std::vector<std::string> out;
    if (trim(v).empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = v.find(',', start);
        out.push_back(unquote(v.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

bool to_double(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    const auto r = std::from_chars(b, e, out);
    return r.ec == std::errc{} && r.ptr == e && std::isfinite(out);
}

template <class Int>
bool to_int(const std::string& s, Int& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    const auto r = std::from_chars(b, e, out);
    return r.ec == std::errc{} && r.ptr == e;
}

class Reader {
public:
    Reader(const std::map<std::string, Value>& values, std::vector<std::string>& errors)
        : values_(values), errors_(errors) {}

    void number(const std::string& key, double& dst) {
        if (const Value* v = find(key)) {
            if (!to_double(unquote(v->raw), dst)) type_error(*v, key, "a number");
        }
    }
    template <class Int>
    void integer(const std::string& key, Int& dst) {
        if (const Value* v = find(key)) {
            if (!to_int(unquote(v->raw), dst)) type_error(*v, key, "an integer");
        }
    }
    void text(const std::string& key, std::string& dst) {
        if (const Value* v = find(key)) dst = unquote(v->raw);
    }
    void numbers(const std::string& key, std::vector<double>& dst) {
        if (const Value* v = find(key)) {
            std::vector<double> out;
            for (const auto& item : split_list(v->raw)) {
                double d = 0.0;
                if (!to_double(item, d)) return type_error(*v, key, "a list of numbers");
                out.push_back(d);
            }
            dst = std::move(out);
        }
    }
    void integers(const std::string& key, std::vector<int>& dst) {
        if (const Value* v = find(key)) {
            std::vector<int> out;
            for (const auto& item : split_list(v->raw)) {
                int d = 0;
                if (!to_int(item, d)) return type_error(*v, key, "a list of integers");
                out.push_back(d);
            }
            dst = std::move(out);
        }
    }
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    int line_of(const std::string& key) const {
        const auto it = values_.find(key);
        return it == values_.end() ? 0 : it->second.line;
    }

private:
    const Value* find(const std::string& key) const {
        const auto it = values_.find(key);
        return it == values_.end() ? nullptr : &it->second;
    }
    void type_error(const Value& v, const std::string& key, const char* expected) {
        errors_.push_back("line " + std::to_string(v.line) + ": '" + key + "' expects " + expected + ", got '" +
                          v.raw + "'");
    }

    const std::map<std::string, Value>& values_;
    std::vector<std::string>& errors_;
};

const std::vector<std::string>& sections() {
    static const std::vector<std::string> s{"spatial", "time", "riemann", "two_point", "uniform", "substitution"};
    return s;
}

const std::vector<std::string>& keys() {
    static const std::vector<std::string> k{
        "sigma", "sigma_param", "x0", "n_fine", "levels", "n_paths", "seed", "workers", "output_dir",
        "lattice_max", "lattice_step", "moment", "band_constant",
        "spatial.base", "spatial.gaps_log2", "spatial.growth_points", "spatial.min_slope", "spatial.min_r2",
        "spatial.max_growth_slope",
        "time.s", "time.gaps_log2", "time.min_slope", "time.max_slope", "time.min_r2",
        "riemann.x_values", "riemann.min_slope",
        "two_point.base", "two_point.gaps_log2", "two_point.levels", "two_point.min_slope",
        "two_point.max_constant_spread", "two_point.min_i_slope",
        "uniform.max_ratio",
        "substitution.z", "substitution.z_value", "substitution.dx_log2", "substitution.max_ratio",
        "substitution.min_dx_slope", "substitution.max_leakage"};
    return k;
}

/// Minimum fine steps per partition interval, as a power of two.
constexpr int kQuadratureLevels = 6;

bool is_power_of_two(std::uint64_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// k such that v == 2^-k exactly, or -1.
int dyadic_exponent(double v) {
    if (!(v > 0.0) || v > 1.0) return -1;
    int e = 0;
    const double m = std::frexp(v, &e);
    return m == 0.5 ? 1 - e : -1;
}

int log2_exact(std::uint64_t n) {
    int k = 0;
    while ((std::uint64_t{1} << k) < n) ++k;
    return k;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error([&] {
          std::string msg = "invalid configuration:";
          for (const auto& e : errors) msg += "\n  " + e;
          return msg;
      }()),
      errors_(std::move(errors)) {}

std::vector<std::string> config_keys() { return keys(); }

ConfigResult parse_config(std::string_view text) {
    ConfigResult res;
    auto& errors = res.errors;
    std::map<std::string, Value> values;
    const std::set<std::string> known(keys().begin(), keys().end());

    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const std::string_view line = trim(strip_comment(raw));
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(line_no) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') {
                errors.push_back(where + "unterminated section header");
                continue;
            }
            const std::string name(trim(line.substr(1, line.size() - 2)));
            if (name == "global") section.clear();
            else if (std::find(sections().begin(), sections().end(), name) != sections().end()) section = name;
            else errors.push_back(where + "unknown section [" + name + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            errors.push_back(where + "expected 'key = value'");
            continue;
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) {
            errors.push_back(where + "missing key");
            continue;
        }
        const std::string full = key.find('.') != std::string::npos || section.empty() ? key : section + "." + key;
        if (!known.count(full)) {
            errors.push_back(where + "unknown key '" + full + "'");
            continue;
        }
        if (value.empty()) {
            errors.push_back(where + "missing value for '" + full + "'");
            continue;
        }
        values[full] = Value{value, line_no};
    }

    RunConfig& rc = res.config;
    StudyConfig& sc = rc.study;
    CommonSettings& c = sc.common;
    Reader r(values, errors);

    double sigma_param = 0.0;
    r.text("sigma", rc.sigma_name);
    r.number("sigma_param", sigma_param);
    r.number("x0", c.x0);
    std::uint64_t n_fine = c.n_fine;
    r.integer("n_fine", n_fine);
    r.integers("levels", c.levels);
    std::uint64_t n_paths = c.n_paths;
    r.integer("n_paths", n_paths);
    r.integer("seed", c.seed);
    r.integer("workers", c.workers);
    r.text("output_dir", rc.output_dir);
    r.number("lattice_max", c.lattice_max);
    r.number("lattice_step", c.lattice_step);
    r.number("moment", c.moment);
    r.number("band_constant", c.band_constant);

    auto& sp = sc.spatial;
    r.number("spatial.base", sp.base);
    r.integers("spatial.gaps_log2", sp.gaps_log2);
    r.numbers("spatial.growth_points", sp.growth_points);
    r.number("spatial.min_slope", sp.min_slope);
    r.number("spatial.min_r2", sp.min_r2);
    r.number("spatial.max_growth_slope", sp.max_growth_slope);

    auto& tm = sc.time;
    r.number("time.s", tm.s);
    r.integers("time.gaps_log2", tm.gaps_log2);
    r.number("time.min_slope", tm.min_slope);
    r.number("time.max_slope", tm.max_slope);
    r.number("time.min_r2", tm.min_r2);

    r.numbers("riemann.x_values", sc.riemann.x_values);
    r.number("riemann.min_slope", sc.riemann.min_slope);

    auto& tp = sc.two_point;
    r.number("two_point.base", tp.base);
    r.integers("two_point.gaps_log2", tp.gaps_log2);
    r.integers("two_point.levels", tp.levels);
    r.number("two_point.min_slope", tp.min_slope);
    r.number("two_point.max_constant_spread", tp.max_constant_spread);
    r.number("two_point.min_i_slope", tp.min_i_slope);

    r.number("uniform.max_ratio", sc.uniform.max_ratio);

    auto& su = sc.substitution;
    std::string z_name = z_kind_name(su.z);
    r.text("substitution.z", z_name);
    r.number("substitution.z_value", su.z_value);
    r.integers("substitution.dx_log2", su.dx_log2);
    r.number("substitution.max_ratio", su.max_ratio);
    r.number("substitution.min_dx_slope", su.min_dx_slope);
    r.number("substitution.max_leakage", su.max_leakage);

    // Constraints. Each failure is recorded; validation continues.
    auto fail = [&](const std::string& key, const std::string& msg) {
        const int line = r.line_of(key);
        errors.push_back((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + key + ": " + msg);
    };

    try {
        c.sigma = r.has("sigma_param") ? CoefficientSet::from_name(rc.sigma_name, sigma_param)
                                       : CoefficientSet::from_name(rc.sigma_name);
    } catch (const std::exception& e) {
        fail("sigma", e.what());
    }
    try {
        su.z = parse_z_kind(z_name);
    } catch (const std::exception& e) {
        fail("substitution.z", e.what());
    }

    int fine_log2 = -1;
    if (!is_power_of_two(n_fine) || n_fine < 2) {
        fail("n_fine", std::to_string(n_fine) +
                           " is not dyadic: the fine grid needs n_fine = 2^k intervals (k >= 1) so every "
                           "partition nests exactly");
    } else {
        c.n_fine = static_cast<std::size_t>(n_fine);
        fine_log2 = log2_exact(n_fine);
    }
    if (n_paths < 2) fail("n_paths", "need at least 2 paths");
    else c.n_paths = static_cast<std::size_t>(n_paths);
    if (c.workers < 0) fail("workers", "must be >= 0 (0 = OpenMP default)");
    if (!(c.x0 >= 0.0)) fail("x0", "initial value must be >= 0");
    if (!(c.moment > 0.0)) fail("moment", "must be > 0");
    if (rc.output_dir.empty()) fail("output_dir", "must not be empty");

    auto check_levels = [&](const std::string& key, const std::vector<int>& levels) {
        if (levels.empty()) fail(key, "need at least one level");
        for (int l : levels) {
            if (l < 1) fail(key, "level " + std::to_string(l) + " must be >= 1");
            else if (fine_log2 >= 0 && l > fine_log2) {
                fail(key, "level " + std::to_string(l) + " exceeds the fine resolution (n_fine = 2^" +
                              std::to_string(fine_log2) + ")");
            } else if (fine_log2 >= 0 && l + kQuadratureLevels > fine_log2) {
                fail(key, "level " + std::to_string(l) + " needs n_fine >= 2^" +
                              std::to_string(l + kQuadratureLevels) + " (2^" + std::to_string(kQuadratureLevels) +
                              " fine steps per partition interval for the trapezoid averages), got 2^" +
                              std::to_string(fine_log2));
            }
        }
    };
    check_levels("levels", c.levels);
    check_levels("two_point.levels", tp.levels);

    auto check_gaps = [&](const std::string& key, const std::vector<int>& gaps, std::size_t min_count) {
        if (gaps.size() < min_count) fail(key, "need at least " + std::to_string(min_count) + " entries for a rate fit");
        for (int g : gaps) {
            if (g < 0) fail(key, "exponent " + std::to_string(g) + " must be >= 0");
        }
    };
    check_gaps("spatial.gaps_log2", sp.gaps_log2, 3);
    check_gaps("time.gaps_log2", tm.gaps_log2, 3);
    check_gaps("two_point.gaps_log2", tp.gaps_log2, 3);
    check_gaps("substitution.dx_log2", su.dx_log2, 3);
    if (c.levels.size() < 3) fail("levels", "need at least 3 levels for a rate fit");
    if (!(sp.base >= 0.0)) fail("spatial.base", "must be >= 0");
    if (!(tp.base >= 0.0)) fail("two_point.base", "must be >= 0");
    for (double x : sp.growth_points) {
        if (!(x >= 0.0)) fail("spatial.growth_points", "points must be >= 0");
    }
    for (double x : sc.riemann.x_values) {
        if (!(x >= 0.0)) fail("riemann.x_values", "points must be >= 0");
    }
    if (sc.riemann.x_values.empty()) fail("riemann.x_values", "need at least one point");

    if (fine_log2 >= 0) {
        const double n = static_cast<double>(c.n_fine);
        const double s_cells = tm.s * n;
        if (!(tm.s >= 0.0 && tm.s < 1.0) || s_cells != std::floor(s_cells)) {
            fail("time.s", "must be a fine-grid knot in [0, 1)");
        }
        for (int g : tm.gaps_log2) {
            if (g > fine_log2) fail("time.gaps_log2", "gap 2^-" + std::to_string(g) + " is below the fine step");
            else if (tm.s + std::ldexp(1.0, -g) > 1.0) fail("time.gaps_log2", "s + 2^-" + std::to_string(g) + " exceeds 1");
        }
    }
    if (tm.min_slope > tm.max_slope) fail("time.min_slope", "exceeds time.max_slope");

    const int step_k = dyadic_exponent(c.lattice_step);
    if (step_k < 0) {
        fail("lattice_step", "must be 2^-k for some k >= 0 so lattice points are exact");
    }
    auto divides = [&](double dx) {
        const double cells = c.lattice_max / dx;
        return cells >= 1.0 && cells == std::floor(cells);
    };
    if (!(c.lattice_max > 0.0)) fail("lattice_max", "must be > 0");
    else if (step_k >= 0 && !divides(c.lattice_step)) fail("lattice_max", "must be a multiple of lattice_step");
    for (int k : su.dx_log2) {
        if (k >= 0 && c.lattice_max > 0.0 && !divides(std::ldexp(1.0, -k))) {
            fail("substitution.dx_log2", "2^-" + std::to_string(k) + " does not divide lattice_max");
        }
    }
    if (su.z == ZKind::constant && !(su.z_value >= 0.0)) fail("substitution.z_value", "must be >= 0");

    c.config_echo = std::string(text);
    return res;
}

RunConfig parse_config_or_throw(std::string_view text) {
    auto res = parse_config(text);
    if (!res.ok()) throw ConfigError(std::move(res.errors));
    return std::move(res.config);
}

std::string with_overrides(std::string text, const std::vector<std::string>& overrides) {
    if (overrides.empty()) return text;
    if (!text.empty() && text.back() != '\n') text += '\n';
    text += "[global]\n";
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) {
            throw ConfigError({"--set '" + o + "': expected key=value"});
        }
        text += std::string(trim(std::string_view(o).substr(0, eq))) + " = " +
                std::string(trim(std::string_view(o).substr(eq + 1))) + "\n";
    }
    return text;
}

}  // namespace rsde
