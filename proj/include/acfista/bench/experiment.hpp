#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "acfista/core.hpp"
#include "acfista/diagnostics.hpp"

namespace acfista::bench {

// One solver entry of an experiment: a method name, a display label, and raw
// JSON overrides applied on top of the instance-derived solver defaults.
struct SolverSpec {
    std::string method;  // ac_fista | ac_fista_restart | ac_acg | fista_constant
    std::string label;
    nlohmann::json overrides = nlohmann::json::object();
};

struct ExperimentConfig {
    std::string name;
    std::uint64_t seed = 0;
    std::string output_dir = "out";
    long trace_stride = 1;
    nlohmann::json problem;  // family + generation/file parameters
    std::vector<SolverSpec> solvers;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

// Schema/reference checks only; throws std::runtime_error on problems.
void validate_config(const ExperimentConfig& config);

struct SummaryRow {
    std::string method;
    std::string reason;
    long iterations = 0;
    long resolvents = 0;
    double final_phi = 0.0;
    double final_residual = 0.0;
    std::optional<double> theta_bar;
    std::optional<double> tau_bar;
    double bad_fraction = 0.0;
};

// Deterministic CSV (6 significant digits); rejects empty input.
std::string emit_summary_table(const std::vector<SummaryRow>& rows);

// Instance + shared start point built from the config's problem block.
struct BuiltProblem {
    ProblemOracle oracle;
    Point z0;
    nlohmann::json descriptor;
};

BuiltProblem build_problem(const nlohmann::json& problem, std::uint64_t seed);

struct ExperimentOutcome {
    std::vector<SummaryRow> rows;
    std::vector<std::string> trace_files;
    std::string summary_file;
    std::string report_file;
    std::string metadata_file;
};

// Runs every solver spec on the same instance and start point; writes
// per-solver trace CSVs, summary.csv, report.json and metadata.json under
// config.output_dir. Timing lives in metadata.json (and report.json) so the
// CSVs are byte-stable for a fixed config and seed.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

// CLI flag overrides; any unset optional leaves the config untouched.
void apply_overrides(ExperimentConfig& config, std::optional<long> max_iter,
                     std::optional<double> tol, std::optional<std::string> mode,
                     std::optional<std::string> out_dir, std::optional<std::uint64_t> seed);

std::string format_double(double value, int significant = 17);

}  // namespace acfista::bench
