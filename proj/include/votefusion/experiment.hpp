#pragma once

// Config-driven experiments and the built-in presets behind the votefusion
// command line tool. See README.md for the config format.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "votefusion/detection.hpp"
#include "votefusion/partial.hpp"
#include "votefusion/roc.hpp"

namespace votefusion {

inline constexpr int kSchemaVersion = 1;

// Invalid or unparseable configuration. field() is a JSON pointer such as
// "/agents/1/variance", or "line L, column C" for syntax errors.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& message)
        : std::runtime_error(field.empty() ? message : field + ": " + message), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

enum class OutputFormat { csv, json };

OutputFormat parse_format(const std::string& name);

struct McSpec {
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 1;
};

struct ExperimentConfig {
    Prior prior{0.5};
    CostModel costs{1.0, 1.0};
    std::vector<LikelihoodModel> agents;
    FusionRule rule{1, 1};
    VotingMode mode = VotingMode::secret;
    std::vector<int> ordering;  // empty = identity
    bool search_ordering = false;
    std::optional<ObservationGraph> graph;
    std::optional<std::vector<double>> sweep;  // ROC weights
    std::optional<McSpec> mc;
    std::string out_dir = "results";
    OutputFormat format = OutputFormat::csv;
    SolverOptions solver;
};

// Throws ConfigError naming the offending field.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Command-line overrides; unset fields keep the config's values.
struct RunOptions {
    std::optional<std::string> out_dir;
    std::optional<OutputFormat> format;
    std::optional<std::uint64_t> seed;
    int jobs = 1;
};

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
    std::string name;  // file stem
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

// 17 significant digits; "inf" and "-inf" for infinite values.
std::string format_number(double x);
std::string to_csv(const Table& table);
std::string to_json(const Table& table);

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct RunResult {
    std::vector<Table> tables;
    std::vector<Check> checks;
    std::vector<std::string> files;  // filled by write_tables
    bool checks_passed() const;
};

RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options);

std::vector<std::string> preset_names();
// ArgumentError on an unknown name.
RunResult run_preset(const std::string& name, const RunOptions& options);

// Writes every table (and a checks table when there are checks) into dir.
void write_tables(RunResult& result, const std::string& dir, OutputFormat format);

// "1-0-2" for orderings; "-" when empty.
std::string ordering_label(const std::vector<int>& ordering);

}  // namespace votefusion
