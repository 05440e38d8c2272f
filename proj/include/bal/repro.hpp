#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bal {

// One embedded assertion of an experiment.
struct Check {
    std::string name;
    std::string relation; // "near", ">=", "<=", "holds"
    double actual = 0;
    double expected = 0;
    double tol = 0;
    bool pass = false;
    std::string line() const;
    nlohmann::json to_json() const;
};

Check check_near(std::string name, double actual, double expected, double tol);
Check check_ge(std::string name, double actual, double bound, double tol = 0);
Check check_le(std::string name, double actual, double bound, double tol = 0);
Check check_holds(std::string name, bool ok);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<nlohmann::json>> rows;
    std::string to_csv() const;
};

struct ExperimentConfig {
    std::optional<nlohmann::json> dist; // file path string or inline object
    std::optional<int> n;
    std::optional<double> budget;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> samples;
    std::optional<double> tol;
    std::optional<std::string> out;
    bool exact = false;
    std::optional<int> h;
    std::optional<double> supply;
    std::optional<int> agents;
    std::optional<double> v_lo;
    std::optional<double> v_hi;
    std::optional<double> pi;
    std::optional<double> eps;

    // Keys match the long flag names; unknown keys raise ConfigError.
    static ExperimentConfig from_json(const nlohmann::json& j);
    // Overlay the fields set in `o`.
    void merge(const ExperimentConfig& o);
    // Everything except the output directory.
    nlohmann::json to_json() const;
};

struct ExperimentResult {
    std::string name;
    nlohmann::json config;
    nlohmann::json data;
    Table table;
    std::vector<Check> checks;
    bool pass() const;
    nlohmann::json to_json() const;
};

const std::vector<std::string>& experiment_names();
// ConfigError for an unknown name or invalid configuration.
ExperimentResult run_experiment(const std::string& name, const ExperimentConfig& cfg);

// Writes <dir>/<name>.csv and <dir>/<name>.json.
void write_result(const ExperimentResult& r, const std::string& dir);

} // namespace bal
