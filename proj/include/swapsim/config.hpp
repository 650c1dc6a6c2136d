#pragma once
// INI-style experiment configuration: strict parsing (unknown sections or
// keys are errors that name the offending line) and a canonical dump that
// round-trips every double exactly.

#include <stdexcept>
#include <string>
#include <string_view>

#include "swapsim/experiment.hpp"

namespace swapsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// Parse configuration text; origin is used in error messages.
/// Throws ConfigError for malformed or unknown input and
/// std::invalid_argument when a parsed value violates a model invariant.
ExperimentConfig parse_config_text(std::string_view text,
                                   const std::string& origin = "<string>");

/// Parse a configuration file from disk.
ExperimentConfig parse_config(const std::string& path);

/// Canonical INI rendering; parse_config_text(dump_config(c)) == c.
std::string dump_config(const ExperimentConfig& cfg);

}  // namespace swapsim
