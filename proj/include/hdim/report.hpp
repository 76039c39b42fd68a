#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hdim/groups.hpp"

namespace hdim {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class ReportError : public std::runtime_error {
public:
    explicit ReportError(const std::string& what) : std::runtime_error(what) {}
};

// One run's worth of knobs. Serializes to JSON losslessly; theta stays a
// decimal string so the exact-rational comparison path never sees a float.
struct RunConfig {
    std::string op = "all";
    std::string group = "z2";      // z1..z6, heisenberg, or an inline JSON spec
    std::string generators = "standard";
    int nmax = 30;
    int radius = 10;
    int inner = -1;                // op-specific secondary radius; -1 = derived
    int degree = 1;
    std::vector<int> schedule = {8, 12};
    double rel_tol = 1e-8;
    std::string theta = "0.1";
    std::uint64_t seed = 0x5eedULL;
    std::string cache_dir;
    std::string out;               // output path prefix; empty = stdout only
    std::string format = "csv";    // stdout format: csv rows or the full json
    int jobs = 1;
    std::string boundary;          // polynomial text; empty = op default
    double harm_tol = 1e-8;
    int oracle_dim = 2;            // D for the oracle subcommand
    double rough_a = 2.0;          // claimed distortion for rough-check
    double rough_b = 1.0;
    int rough_window = 149;        // rough suite main window radius
    bool rough_stage = true;       // include the rough suite in pipeline_all
    std::string graph_csv;         // optional edge-list input for rough-check
    std::string map_csv;           // optional vertex->coordinates input

    void validate() const; // throws ConfigError
};

nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const nlohmann::json& j); // rejects unknown keys
std::string config_hash(const RunConfig& cfg);       // sha256 of the canonical form

// Group shorthand: "z1".."z6", "heisenberg", "heisenberg-z<q>", or inline
// JSON accepted by spec_from_json.
GroupSpec parse_group(const std::string& text);

// "8,12,20" -> {8, 12, 20}; empty text -> {}.
std::vector<int> parse_int_list(const std::string& text);

// Report = config echo + one payload per operation + timings kept separate so
// the determinism hash is machine-independent. Numeric series live under
// payload["series"][name] = {"header": [...], "rows": [[...], ...]} and are
// also emitted as CSV.
struct Report {
    RunConfig config;
    nlohmann::json payload = nlohmann::json::object();
    nlohmann::json timings = nlohmann::json::object();
    bool ok = true;

    std::string determinism_hash() const; // sha256 of everything but timings
    nlohmann::json to_json() const;
};

// (series name, csv text) for every series in the payload, subkeys sorted;
// for aggregate reports this walks payload["stages"][*]["series"] too.
std::vector<std::pair<std::string, std::string>> csv_series(const Report& rep);

// The series printed as plain CSV rows on stdout in csv mode.
std::string primary_series_csv(const Report& rep);

void write_text_file(const std::string& path, const std::string& text);

// <prefix>.json plus <prefix>.<series>.csv for each series.
std::vector<std::string> write_report_files(const Report& rep, const std::string& prefix);

} // namespace hdim
