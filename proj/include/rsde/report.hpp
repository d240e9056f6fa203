#pragma once

#include <string>

#include "rsde/studies.hpp"

namespace rsde {

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

/// Study CSV. Leading '#' lines carry the format version, study name, seed and
/// the configuration echo (one '# config: ' line per input line), then
///   study,statistic,cell,p,moment,stderr,norm,norm_stderr,n_paths,n_nonfinite,seed
/// `moment` is E|Y|^p (E[Y] when p = 0), `norm` is moment^(1/p).
std::string study_csv(const StudyReport& r);

/// JSON summary: pass/fail, checks, fitted slopes, notes, config echo.
std::string study_summary_json(const StudyReport& r);

/// Writes via a temporary file in the same directory and renames over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace rsde
