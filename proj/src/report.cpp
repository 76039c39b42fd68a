#include "hdim/report.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hdim/sha256.hpp"
#include "hdim/version.hpp"

namespace hdim {
namespace {

bool valid_decimal(const std::string& s) {
    if (s.empty()) return false;
    bool dot = false, nonzero = false;
    for (char c : s) {
        if (c == '.') {
            if (dot) return false;
            dot = true;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            if (c != '0') nonzero = true;
        } else {
            return false;
        }
    }
    return nonzero;
}

std::string csv_cell(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

std::string series_to_csv(const nlohmann::json& s, bool with_header) {
    std::ostringstream os;
    if (with_header && s.contains("header")) {
        const auto& h = s.at("header");
        for (std::size_t i = 0; i < h.size(); ++i)
            os << (i ? "," : "") << csv_cell(h.at(i));
        os << "\n";
    }
    for (const auto& row : s.at("rows")) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << csv_cell(row.at(i));
        os << "\n";
    }
    return os.str();
}

void collect_series(const nlohmann::json& payload, const std::string& prefix,
                    std::vector<std::pair<std::string, std::string>>& out) {
    if (payload.contains("series"))
        for (const auto& [name, s] : payload.at("series").items())
            out.emplace_back(prefix + name, series_to_csv(s, true));
    if (payload.contains("stages"))
        for (const auto& [stage, sub] : payload.at("stages").items())
            collect_series(sub, prefix + stage + ".", out);
}

} // namespace

void RunConfig::validate() const {
    if (op.empty()) throw ConfigError("op must not be empty");
    if (nmax < 0) throw ConfigError("nmax must be >= 0");
    if (radius < 0) throw ConfigError("radius must be >= 0");
    if (degree < 0) throw ConfigError("degree must be >= 0");
    if (rel_tol <= 0.0 || rel_tol >= 1.0) throw ConfigError("rel-tol must be in (0, 1)");
    if (harm_tol <= 0.0) throw ConfigError("harm-tol must be > 0");
    if (!valid_decimal(theta)) throw ConfigError("theta must be a positive decimal string");
    for (std::size_t i = 1; i < schedule.size(); ++i)
        if (schedule[i] <= schedule[i - 1])
            throw ConfigError("schedule must be strictly increasing");
    if (format != "csv" && format != "json")
        throw ConfigError("format must be csv or json");
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
    if (generators != "standard")
        throw ConfigError("only the standard generator convention is supported");
    if (oracle_dim < 1 || oracle_dim > 8) throw ConfigError("D must be in [1, 8]");
    if (rough_a < 1.0 || rough_b < 0.0)
        throw ConfigError("rough distortion needs a >= 1 and b >= 0");
    if (rough_window < 9) throw ConfigError("rough window radius must be >= 9");
}

nlohmann::json config_to_json(const RunConfig& c) {
    return nlohmann::json{{"op", c.op},
                          {"group", c.group},
                          {"generators", c.generators},
                          {"nmax", c.nmax},
                          {"radius", c.radius},
                          {"inner", c.inner},
                          {"degree", c.degree},
                          {"schedule", c.schedule},
                          {"rel_tol", c.rel_tol},
                          {"theta", c.theta},
                          {"seed", c.seed},
                          {"cache_dir", c.cache_dir},
                          {"out", c.out},
                          {"format", c.format},
                          {"jobs", c.jobs},
                          {"boundary", c.boundary},
                          {"harm_tol", c.harm_tol},
                          {"D", c.oracle_dim},
                          {"rough_a", c.rough_a},
                          {"rough_b", c.rough_b},
                          {"rough_window", c.rough_window},
                          {"rough_stage", c.rough_stage},
                          {"graph_csv", c.graph_csv},
                          {"map_csv", c.map_csv}};
}

RunConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig c;
    const nlohmann::json defaults = config_to_json(c);
    for (const auto& [key, value] : j.items())
        if (!defaults.contains(key)) throw ConfigError("unknown config key: " + key);
    try {
        c.op = j.value("op", c.op);
        c.group = j.value("group", c.group);
        c.generators = j.value("generators", c.generators);
        c.nmax = j.value("nmax", c.nmax);
        c.radius = j.value("radius", c.radius);
        c.inner = j.value("inner", c.inner);
        c.degree = j.value("degree", c.degree);
        if (j.contains("schedule")) c.schedule = j.at("schedule").get<std::vector<int>>();
        c.rel_tol = j.value("rel_tol", c.rel_tol);
        c.theta = j.value("theta", c.theta);
        c.seed = j.value("seed", c.seed);
        c.cache_dir = j.value("cache_dir", c.cache_dir);
        c.out = j.value("out", c.out);
        c.format = j.value("format", c.format);
        c.jobs = j.value("jobs", c.jobs);
        c.boundary = j.value("boundary", c.boundary);
        c.harm_tol = j.value("harm_tol", c.harm_tol);
        c.oracle_dim = j.value("D", c.oracle_dim);
        c.rough_a = j.value("rough_a", c.rough_a);
        c.rough_b = j.value("rough_b", c.rough_b);
        c.rough_window = j.value("rough_window", c.rough_window);
        c.rough_stage = j.value("rough_stage", c.rough_stage);
        c.graph_csv = j.value("graph_csv", c.graph_csv);
        c.map_csv = j.value("map_csv", c.map_csv);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config value: ") + e.what());
    }
    c.validate();
    return c;
}

std::string config_hash(const RunConfig& cfg) {
    return sha256_hex(config_to_json(cfg).dump());
}

GroupSpec parse_group(const std::string& text) {
    if (text.empty()) throw ConfigError("empty group name");
    if (text.front() == '{') {
        try {
            return spec_from_json(text);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("bad group JSON: ") + e.what());
        }
    }
    if (text == "heisenberg") return GroupSpec::heisenberg();
    if (text.size() >= 2 && text.front() == 'z') {
        const std::string num = text.substr(1);
        if (!num.empty() && num.find_first_not_of("0123456789") == std::string::npos) {
            const int d = std::stoi(num);
            if (d >= 1 && d <= 8) return GroupSpec::lattice(d);
        }
    }
    throw ConfigError("unknown group: " + text + " (use z1..z8, heisenberg, or JSON)");
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    if (text.empty()) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        int v = 0;
        try {
            v = std::stoi(item, &pos);
        } catch (const std::exception&) {
            throw ConfigError("bad integer list entry: " + item);
        }
        if (pos != item.size()) throw ConfigError("bad integer list entry: " + item);
        out.push_back(v);
    }
    return out;
}

std::string Report::determinism_hash() const {
    const nlohmann::json core{{"tool_version", kToolVersion},
                              {"config", config_to_json(config)},
                              {"config_hash", config_hash(config)},
                              {"ok", ok},
                              {"payload", payload}};
    return sha256_hex(core.dump());
}

nlohmann::json Report::to_json() const {
    nlohmann::json j{{"tool_version", kToolVersion},
                     {"config", config_to_json(config)},
                     {"config_hash", config_hash(config)},
                     {"ok", ok},
                     {"payload", payload}};
    j["determinism_hash"] = determinism_hash();
    j["timings"] = timings;
    return j;
}

std::vector<std::pair<std::string, std::string>> csv_series(const Report& rep) {
    std::vector<std::pair<std::string, std::string>> out;
    collect_series(rep.payload, "", out);
    return out;
}

std::string primary_series_csv(const Report& rep) {
    if (!rep.payload.contains("primary_series")) return {};
    const std::string name = rep.payload.at("primary_series").get<std::string>();
    if (!rep.payload.contains("series") || !rep.payload.at("series").contains(name)) return {};
    return series_to_csv(rep.payload.at("series").at(name), false);
}

void write_text_file(const std::string& path, const std::string& text) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
        if (ec) throw ReportError("cannot create directory " + p.parent_path().string());
    }
    std::ofstream os(p, std::ios::trunc);
    if (!os) throw ReportError("cannot open " + path + " for writing");
    os << text;
    if (!os) throw ReportError("short write to " + path);
}

std::vector<std::string> write_report_files(const Report& rep, const std::string& prefix) {
    std::vector<std::string> written;
    const std::string jpath = prefix + ".json";
    write_text_file(jpath, rep.to_json().dump(2) + "\n");
    written.push_back(jpath);
    for (const auto& [name, text] : csv_series(rep)) {
        std::string safe = name;
        for (char& ch : safe)
            if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '.' && ch != '-' &&
                ch != '_')
                ch = '-';
        const std::string cpath = prefix + "." + safe + ".csv";
        write_text_file(cpath, text);
        written.push_back(cpath);
    }
    return written;
}

} // namespace hdim
