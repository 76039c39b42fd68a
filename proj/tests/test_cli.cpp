#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include <sys/wait.h>

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    const char* bin = std::getenv("HDIM_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "HDIM_BIN must point at the CLI binary");
    const std::string cmd = std::string("\"") + bin + "\" " + args + " 2>/dev/null";
    std::FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult res;
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0)
        res.out.append(buf.data(), got);
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

} // namespace

TEST_CASE("cli growth prints exact csv rows") {
    const CliResult r = run_cli("growth --group z1 --nmax 3");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "0,1\n1,3\n2,5\n3,7\n");
}

TEST_CASE("cli oracle prints the kernel dimension") {
    CHECK(run_cli("oracle --D 2 --d 2").out == "5\n");
    CHECK(run_cli("oracle --D 3 --d 2").out == "9\n");
    CHECK(run_cli("oracle --D 2 --d 3").out == "7\n");
}

TEST_CASE("cli exit codes distinguish usage errors") {
    CHECK(run_cli("growth --definitely-not-a-flag").exit_code == 2);
    CHECK(run_cli("dim --group z2 --d 1 --schedule 12,8").exit_code == 2);
    CHECK(run_cli("growth --format xml").exit_code == 2);
    CHECK(run_cli("").exit_code == 2); // subcommand required
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("--version").exit_code == 0);
}

TEST_CASE("cli json output carries the report envelope") {
    const CliResult r = run_cli("harnack --group z1 --boundary x1+10 --radius 1 --format json");
    CHECK(r.exit_code == 0);
    const nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j["ok"] == true);
    CHECK(j["config"]["op"] == "harnack");
    CHECK(j["payload"]["ratio"] == 11.0 / 9.0);
    CHECK(j.contains("determinism_hash"));
    CHECK(j.contains("timings"));
}

TEST_CASE("cli meanvalue hand example") {
    const CliResult r = run_cli("meanvalue --group z2 --format json");
    CHECK(r.exit_code == 0);
    const nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j["payload"]["constant"] == 5.0 / 7.0);
    CHECK(j["payload"]["center"] == "1,0");
}

TEST_CASE("cli writes report files on request") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "hdim_cli_out";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string prefix = (dir / "g").string();
    const CliResult r = run_cli("growth --group z2 --nmax 4 --out " + prefix);
    CHECK(r.exit_code == 0);
    REQUIRE(fs::exists(prefix + ".json"));
    REQUIRE(fs::exists(prefix + ".growth.csv"));
    std::ifstream is(prefix + ".growth.csv");
    std::string header;
    std::getline(is, header);
    CHECK(header == "n,beta");
    std::ifstream js(prefix + ".json");
    nlohmann::json j;
    js >> j;
    CHECK(j["config"]["nmax"] == 4);
    CHECK(j["payload"]["max_doubling"] == 41.0 / 13.0); // beta(4)/beta(2)
    fs::remove_all(dir);
}

TEST_CASE("cli config file with flag overrides") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "hdim_cli_cfg";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path cfg_path = dir / "cfg.json";
    {
        nlohmann::json j;
        j["group"] = "z1";
        j["nmax"] = 2;
        std::ofstream os(cfg_path);
        os << j.dump();
    }
    // config alone
    CliResult r = run_cli("growth --config " + cfg_path.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out == "0,1\n1,3\n2,5\n");
    // explicit flag wins over the file
    r = run_cli("growth --config " + cfg_path.string() + " --nmax 3");
    CHECK(r.out == "0,1\n1,3\n2,5\n3,7\n");
    // unknown keys in the file are usage errors
    {
        std::ofstream os(cfg_path);
        os << "{\"nope\": 1}";
    }
    CHECK(run_cli("growth --config " + cfg_path.string()).exit_code == 2);
    CHECK(run_cli("growth --config " + (dir / "missing.json").string()).exit_code == 2);
    fs::remove_all(dir);
}

TEST_CASE("cli rough-check accepts external graph and map files") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "hdim_cli_rough";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path graph = dir / "graph.csv";
    const fs::path map = dir / "map.csv";
    {
        // path on 5 vertices, halved onto Z^1: a (2,1)-rough isometry
        std::ofstream os(graph);
        os << "# edges\n0,1\n1,2\n2,3\n3,4\n";
    }
    {
        std::ofstream os(map);
        os << "0,0\n1,0\n2,1\n3,1\n4,2\n";
    }
    const CliResult ok = run_cli("rough-check --group z1 --graph-csv " + graph.string() +
                                 " --map-csv " + map.string() +
                                 " --a 2 --b 1 --radius 8 --format json");
    CHECK(ok.exit_code == 0);
    const nlohmann::json j = nlohmann::json::parse(ok.out);
    CHECK(j["ok"] == true);
    CHECK(j["payload"]["check"]["violation_count"] == 0);
    CHECK(j["payload"]["source"] == "csv-graph");

    // collapsing every vertex to the origin with b = 0 must fail (exit 1)
    {
        std::ofstream os(map);
        os << "0,0\n1,0\n2,0\n3,0\n4,0\n";
    }
    const CliResult bad = run_cli("rough-check --group z1 --graph-csv " + graph.string() +
                                  " --map-csv " + map.string() + " --a 1 --b 0 --radius 8");
    CHECK(bad.exit_code == 1);
    fs::remove_all(dir);
}

TEST_CASE("cli rough builtin subcommands run on reduced windows") {
    const CliResult chk = run_cli("rough-check --radius 15 --format json");
    CHECK(chk.exit_code == 0);
    const nlohmann::json j = nlohmann::json::parse(chk.out);
    CHECK(j["ok"] == true);
    CHECK(j["payload"]["check"]["a"] == 2.0);
    CHECK(j["payload"]["check"]["b"] == 1.0);
}
