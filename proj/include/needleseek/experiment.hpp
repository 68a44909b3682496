#pragma once

// Config-driven experiments producing CSV tables.
//
// A config is a flat text file of `key = value` lines; `#` starts a comment.
// `experiment` selects the table, every other key must belong to it. See
// list_experiments() for keys and defaults.

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "needleseek/objective.hpp"
#include "needleseek/sim.hpp"

namespace needleseek {

/// Invalid or unknown configuration; the CLI exits with code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Escape, divergence or another numerical failure; the CLI exits with code 3.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using ConfigMap = std::map<std::string, std::string>;

[[nodiscard]] ConfigMap parse_config(std::istream& in);
[[nodiscard]] ConfigMap parse_config_file(const std::string& path);

struct CsvTable {
    std::string file_name;
    std::string content;
};

/// Validates the whole config, then runs. Warnings (large sample counts,
/// ignored parameters) go to `log`. `threads` caps parallel sweeps.
[[nodiscard]] CsvTable run_experiment(const ConfigMap& cfg, std::ostream& log, int threads = 1);

/// x' = -grad F(x).
[[nodiscard]] Trajectory gradient_flow_baseline(const Objective& f, double x0, double horizon,
                                                const SolverConfig& cfg);

/// Experiment kinds with their keys and defaults, one block per kind.
[[nodiscard]] std::string list_experiments();

/// NEEDLESEEK_THREADS, default 1; invalid values fall back to 1.
[[nodiscard]] int threads_from_env();

/// Full-precision decimal form used in every CSV.
[[nodiscard]] std::string format_number(double v);

}  // namespace needleseek
