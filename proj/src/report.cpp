#include "rsde/report.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace rsde {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

namespace {

void echo_lines(std::ostringstream& os, const std::string& text) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) os << "# config: " << line << '\n';
}

nlohmann::json number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

}  // namespace

std::string study_csv(const StudyReport& r) {
    std::ostringstream os;
    os << "# format: " << kReportFormat << '\n';
    os << "# study: " << r.name << '\n';
    os << "# seed: " << r.seed << '\n';
    echo_lines(os, r.config_echo);
    os << "study,statistic,cell,p,moment,stderr,norm,norm_stderr,n_paths,n_nonfinite,seed\n";
    for (const auto& e : r.estimates) {
        os << r.name << ',' << e.label << ',' << e.cell << ',' << format_double(e.p) << ','
           << format_double(e.value) << ',' << format_double(e.standard_error) << ',' << format_double(e.norm())
           << ',' << format_double(e.norm_stderr()) << ',' << e.n_paths << ',' << e.n_nonfinite << ',' << e.seed
           << '\n';
    }
    return os.str();
}

std::string study_summary_json(const StudyReport& r) {
    nlohmann::ordered_json j;
    j["format"] = kReportFormat;
    j["study"] = r.name;
    j["seed"] = r.seed;
    j["passed"] = r.passed();
    auto& checks = j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"name", c.name},
                          {"value", number(c.value)},
                          {"relation", c.relation},
                          {"threshold", number(c.threshold)},
                          {"passed", c.passed},
                          {"note", c.note}});
    }
    auto& fits = j["fits"] = nlohmann::ordered_json::array();
    for (const auto& f : r.fits) {
        fits.push_back({{"label", f.label},
                        {"slope", number(f.slope)},
                        {"intercept", number(f.intercept)},
                        {"r_squared", number(f.r_squared)},
                        {"constant", number(f.constant())},
                        {"warnings", f.warnings}});
    }
    j["notes"] = r.notes;
    j["config"] = r.config_echo;
    return j.dump(2) + "\n";
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

}  // namespace rsde
