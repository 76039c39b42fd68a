#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "hdim/pipeline.hpp"
#include "hdim/report.hpp"
#include "hdim/sha256.hpp"

using namespace hdim;

TEST_CASE("sha256 known vectors") {
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("config json round trip is lossless") {
    RunConfig cfg;
    cfg.op = "dim";
    cfg.group = "z3";
    cfg.nmax = 44;
    cfg.radius = 17;
    cfg.inner = 5;
    cfg.degree = 2;
    cfg.schedule = {6, 9, 14};
    cfg.rel_tol = 1e-7;
    cfg.theta = "0.25";
    cfg.seed = 0xDEADBEEFULL;
    cfg.cache_dir = "/tmp/c";
    cfg.out = "/tmp/o";
    cfg.format = "json";
    cfg.jobs = 3;
    cfg.boundary = "x^2-y^2";
    cfg.harm_tol = 1e-9;
    cfg.oracle_dim = 4;
    cfg.rough_a = 3.0;
    cfg.rough_b = 2.0;
    cfg.rough_window = 99;
    cfg.rough_stage = false;
    cfg.graph_csv = "g.csv";
    cfg.map_csv = "m.csv";
    const RunConfig back = config_from_json(config_to_json(cfg));
    CHECK(config_to_json(back) == config_to_json(cfg));
    CHECK(config_hash(back) == config_hash(cfg));
    CHECK(back.schedule == cfg.schedule);
    CHECK(back.seed == cfg.seed);
    CHECK(back.theta == cfg.theta);
}

TEST_CASE("config rejects unknown keys and bad values") {
    nlohmann::json j = config_to_json(RunConfig{});
    j["surprise"] = 1;
    CHECK_THROWS_AS(config_from_json(j), ConfigError);

    RunConfig bad;
    bad.format = "xml";
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = RunConfig{};
    bad.schedule = {9, 9};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = RunConfig{};
    bad.theta = "0.1.2";
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = RunConfig{};
    bad.theta = "-0.1";
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = RunConfig{};
    bad.rel_tol = 2.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = RunConfig{};
    bad.generators = "exotic";
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = RunConfig{};
    bad.jobs = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    RunConfig good;
    good.validate(); // defaults pass
}

TEST_CASE("parse_group shorthands") {
    CHECK(parse_group("z1") == GroupSpec::lattice(1));
    CHECK(parse_group("z6") == GroupSpec::lattice(6));
    CHECK_THROWS(parse_group("z7")); // element storage caps lattices at six coordinates
    CHECK(parse_group("heisenberg") == GroupSpec::heisenberg());
    CHECK(parse_group("{\"kind\":\"product\",\"base\":{\"kind\":\"lattice\",\"D\":2},\"q\":16}") ==
          GroupSpec::product(GroupSpec::lattice(2), 16));
    CHECK_THROWS(parse_group("z0"));
    CHECK_THROWS(parse_group("f2"));
}

TEST_CASE("parse_int_list") {
    CHECK(parse_int_list("8,12,20") == std::vector<int>{8, 12, 20});
    CHECK(parse_int_list("5") == std::vector<int>{5});
    CHECK(parse_int_list("").empty());
    CHECK_THROWS_AS(parse_int_list("3,x"), ConfigError);
    CHECK_THROWS_AS(parse_int_list("3,,4"), ConfigError);
}

TEST_CASE("report hash covers payload but not timings") {
    Report a;
    a.config.op = "growth";
    a.payload["series"]["growth"] = {{"header", {"n", "beta"}}, {"rows", {{0, 1}, {1, 5}}}};
    a.timings["total_seconds"] = 1.25;
    Report b = a;
    b.timings["total_seconds"] = 99.0;
    CHECK(a.determinism_hash() == b.determinism_hash());
    Report c = a;
    c.payload["series"]["growth"]["rows"][1][1] = 6;
    CHECK(a.determinism_hash() != c.determinism_hash());
    Report d = a;
    d.config.seed = 123;
    CHECK(a.determinism_hash() != d.determinism_hash());
    // the emitted json embeds the hash and the timings
    const nlohmann::json j = a.to_json();
    CHECK(j["determinism_hash"] == a.determinism_hash());
    CHECK(j["timings"]["total_seconds"] == 1.25);
}

TEST_CASE("csv extraction walks plain and staged payloads") {
    Report rep;
    rep.payload["series"]["vals"] = {{"header", {"n", "v"}}, {"rows", {{1, 2.5}, {2, 3.5}}}};
    rep.payload["primary_series"] = "vals";
    const auto series = csv_series(rep);
    REQUIRE(series.size() == 1);
    CHECK(series[0].first == "vals");
    CHECK(series[0].second == "n,v\n1,2.5\n2,3.5\n");
    CHECK(primary_series_csv(rep) == "1,2.5\n2,3.5\n");

    Report staged;
    staged.payload["stages"]["growth"]["series"]["beta"] = {{"header", {"n"}}, {"rows", {{7}}}};
    const auto s2 = csv_series(staged);
    REQUIRE(s2.size() == 1);
    CHECK(s2[0].first == "growth.beta");
    CHECK(s2[0].second == "n\n7\n");
}

TEST_CASE("write_report_files emits json plus one csv per series") {
    const auto dir = std::filesystem::temp_directory_path() / "hdim_report_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    Report rep;
    rep.config.op = "growth";
    rep.payload["series"]["growth"] = {{"header", {"n", "beta"}}, {"rows", {{0, 1}}}};
    const std::string prefix = (dir / "run").string();
    const auto files = write_report_files(rep, prefix);
    REQUIRE(files.size() == 2);
    CHECK(std::filesystem::exists(prefix + ".json"));
    CHECK(std::filesystem::exists(prefix + ".growth.csv"));
    std::ifstream is(prefix + ".json");
    nlohmann::json j;
    is >> j;
    CHECK(j["config"]["op"] == "growth");
    CHECK(j["determinism_hash"] == rep.determinism_hash());
    std::filesystem::remove_all(dir);
}

TEST_CASE("polynomial parser grammar") {
    using Terms = std::vector<std::pair<double, std::vector<int>>>;
    const Terms t1 = parse_polynomial("x^2-y^2", 2);
    REQUIRE(t1.size() == 2);
    CHECK(t1[0].first == 1.0);
    CHECK(t1[0].second == std::vector<int>{2, 0});
    CHECK(t1[1].first == -1.0);
    CHECK(t1[1].second == std::vector<int>{0, 2});

    const Terms t2 = parse_polynomial("x1+10", 2);
    REQUIRE(t2.size() == 2);
    CHECK(t2[0].second == std::vector<int>{1, 0});
    CHECK(t2[1].first == 10.0);
    CHECK(t2[1].second == std::vector<int>{0, 0});

    const Terms t3 = parse_polynomial("3x*y - 2", 2);
    REQUIRE(t3.size() == 2);
    CHECK(t3[0].first == 3.0);
    CHECK(t3[0].second == std::vector<int>{1, 1});
    CHECK(t3[1].first == -2.0);

    const Terms t4 = parse_polynomial("-2.5x2^3", 3);
    REQUIRE(t4.size() == 1);
    CHECK(t4[0].first == -2.5);
    CHECK(t4[0].second == std::vector<int>{0, 3, 0});

    const Terms t5 = parse_polynomial("xy", 2); // implicit product
    REQUIRE(t5.size() == 1);
    CHECK(t5[0].second == std::vector<int>{1, 1});

    CHECK_THROWS_AS(parse_polynomial("", 2), ConfigError);
    CHECK_THROWS_AS(parse_polynomial("q", 2), ConfigError);
    CHECK_THROWS_AS(parse_polynomial("z", 2), ConfigError);  // var 3 of 2
    CHECK_THROWS_AS(parse_polynomial("x^", 2), ConfigError);
    CHECK_THROWS_AS(parse_polynomial("x5", 3), ConfigError); // index out of range
}

TEST_CASE("pipeline stages and determinism hash") {
    RunConfig cfg;
    cfg.op = "all";
    cfg.group = "z2";
    cfg.nmax = 12;
    cfg.schedule = {4, 6};
    cfg.rough_stage = false; // keep the unit run fast; the full stage is
                             // exercised by the acceptance suite
    const Report r1 = run_operation(cfg);
    const Report r2 = run_operation(cfg);
    CHECK(r1.ok);
    CHECK(r1.determinism_hash() == r2.determinism_hash());
    CHECK(r1.payload["stage_ok"]["growth"] == true);
    CHECK(r1.payload["stage_ok"]["rvc"] == true);
    CHECK(r1.payload["stage_ok"]["dim"] == true);
    CHECK(r1.payload["stage_ok"]["inequalities"] == true);
    CHECK(!r1.payload["stages"].contains("rough"));

    RunConfig other = cfg;
    other.seed = cfg.seed + 1;
    const Report r3 = run_operation(other);
    CHECK(r1.determinism_hash() != r3.determinism_hash());
}

TEST_CASE("run_operation rejects unknown ops and propagates usage errors") {
    RunConfig cfg;
    cfg.op = "nonsense";
    CHECK_THROWS_AS(run_operation(cfg), ConfigError);
    RunConfig dim;
    dim.op = "dim";
    dim.degree = 44; // over the candidate construction cap
    CHECK_THROWS_AS(run_operation(dim), ConfigError);
}
