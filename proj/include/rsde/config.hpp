#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rsde/studies.hpp"

namespace rsde {

/// Validated run configuration.
///
/// Grammar, one statement per line:
///   # comment                 (also trailing, outside quotes)
///   [section]                 spatial, time, riemann, two_point, uniform,
///                             substitution; [global] returns to the top level
///   key = value               number, integer, "string" or bare word
///   key = a, b, c             list (optionally wrapped in [ ])
///   section.key = value       dotted key, valid anywhere
/// A later assignment of the same key wins.
struct RunConfig {
    StudyConfig study;
    std::string sigma_name = "sine";
    std::string output_dir = "out";
};

struct ConfigResult {
    RunConfig config;
    /// Every problem found, in line order; empty means valid.
    std::vector<std::string> errors;
    bool ok() const { return errors.empty(); }
};

ConfigResult parse_config(std::string_view text);

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> errors);
    const std::vector<std::string>& errors() const { return errors_; }

private:
    std::vector<std::string> errors_;
};

/// parse_config, throwing ConfigError on any error.
RunConfig parse_config_or_throw(std::string_view text);

/// Appends `key = value` overrides (each given as "key=value") to a config
/// text so they take precedence and are echoed with it.
std::string with_overrides(std::string text, const std::vector<std::string>& overrides);

/// All accepted keys, dotted for section keys.
std::vector<std::string> config_keys();

}  // namespace rsde
