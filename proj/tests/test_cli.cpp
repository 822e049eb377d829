#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "oracles.hpp"
#include "votefusion/errors.hpp"
#include "votefusion/experiment.hpp"

using namespace votefusion;
namespace fs = std::filesystem;

namespace {

const char* kMajority = R"({
  "schema_version": 1,
  "prior": {"p0": 0.5},
  "costs": {"c10": 1, "c01": 1},
  "agents": [
    {"model": "gaussian", "variance": 0.25},
    {"model": "gaussian", "variance": 1.0},
    {"model": "gaussian", "variance": 2.25}
  ],
  "fusion": {"L": 2, "N": 3},
  "mode": "public",
  "ordering": [1, 0, 2],
  "sweep": {"lo": 0.01, "hi": 100, "count": 5},
  "mc": {"trials": 20000, "seed": 5}
})";

std::string field_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<no error>";
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
    auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    return s.replace(pos, from.size(), to);
}

const Table& table(const RunResult& r, const std::string& name) {
    for (const auto& t : r.tables) {
        if (t.name == name) return t;
    }
    FAIL("missing table " << name);
    return r.tables.front();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(VOTEFUSION_BIN) + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("votefusion_test_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("config parses") {
    auto cfg = parse_config(kMajority);
    CHECK(cfg.rule == FusionRule(2, 3));
    CHECK(cfg.mode == VotingMode::full_public);
    CHECK(cfg.ordering == std::vector<int>{1, 0, 2});
    CHECK(cfg.sweep->size() == 5);
    CHECK(cfg.mc->trials == 20000);
    CHECK(cfg.format == OutputFormat::csv);
}

TEST_CASE("config errors name the field") {
    const std::string ok = kMajority;
    CHECK(field_of(replace(ok, "\"schema_version\": 1", "\"schema_version\": 2")) == "/schema_version");
    CHECK(field_of(replace(ok, "\"variance\": 1.0", "\"variance\": -1.0")) == "/agents/1/variance");
    CHECK(field_of(replace(ok, "\"N\": 3", "\"N\": 4")) == "/agents");
    CHECK(field_of(replace(ok, "\"L\": 2", "\"L\": 5")) == "/fusion/L");
    CHECK(field_of(replace(ok, "[1, 0, 2]", "[1, 1, 2]")) == "/ordering");
    CHECK(field_of(replace(ok, "\"public\"", "\"partial\"")) == "/observation_graph");
    CHECK(field_of(replace(ok, "\"public\"", "\"open\"")) == "/mode");
    CHECK(field_of(replace(ok, "\"p0\": 0.5", "\"p0\": 1.0")) == "/prior/p0");
    CHECK(field_of(replace(ok, "\"p0\": 0.5", "\"q0\": 0.5")) == "/prior/q0");
    CHECK(field_of(replace(ok, "\"gaussian\", \"variance\": 0.25", "\"cauchy\"")) == "/agents/0/model");
    CHECK(field_of(replace(replace(ok, "[1, 0, 2]", "\"search\""), "\"public\"", "\"secret\"")) == "/ordering");
    CHECK(field_of(replace(ok, "\"trials\": 20000", "\"trials\": 0")) == "/mc/trials");
    CHECK(field_of(replace(ok, "\"mode\": \"public\",", "")) == "/mode");
    // Syntax errors report where they happened.
    CHECK(field_of(replace(ok, "\"fusion\": {", "\"fusion\" {")) == "line 10, column 12");
}

TEST_CASE("result tables carry the documented headers") {
    auto r = run_experiment(parse_config(kMajority), {});
    auto csv = to_csv(table(r, "roc"));
    CHECK(csv.substr(0, csv.find('\n')) == "weight,pe1,pe2,risk,mode,ordering");
    CHECK(table(r, "roc").rows.size() == 5);
    CHECK(to_csv(table(r, "roc_pareto")).rfind("weight,pe1,pe2,risk,mode,ordering\n", 0) == 0);
    CHECK(table(r, "roc_pareto").rows.size() <= 5);
    CHECK(std::get<std::string>(table(r, "roc").rows[0][5]) == "1-0-2");
    auto th = to_csv(table(r, "thresholds"));
    CHECK(th.substr(0, th.find('\n')) == "agent,history,threshold");
    CHECK(th.find("\n1,-,") != std::string::npos);
    CHECK(table(r, "montecarlo").rows.size() == 1);
}

TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(kInf) == "inf");
    CHECK(format_number(-kInf) == "-inf");
    CHECK(format_number(3.0) == "3");
    Table t{"x", {"a", "b"}, {{-kInf, std::string("p,q")}}};
    CHECK(to_csv(t) == "a,b\n-inf,\"p,q\"\n");
    CHECK(to_json(t).find("\"a\": \"-inf\"") != std::string::npos);
}

TEST_CASE("same config, same bytes") {
    auto cfg = parse_config(kMajority);
    RunOptions opt;
    opt.jobs = 2;
    auto a = run_experiment(cfg, opt);
    opt.jobs = 1;
    auto b = run_experiment(cfg, opt);
    REQUIRE(a.tables.size() == b.tables.size());
    for (std::size_t i = 0; i < a.tables.size(); ++i) {
        CHECK(to_csv(a.tables[i]) == to_csv(b.tables[i]));
        CHECK(to_json(a.tables[i]) == to_json(b.tables[i]));
    }
}

TEST_CASE("two-agent OR team, secret mode, against a dense grid") {
    const std::string text = R"({
      "schema_version": 1,
      "prior": {"p0": 0.6},
      "costs": {"c10": 1.0, "c01": 2.0},
      "agents": [{"model": "gaussian", "variance": 0.5}, {"model": "exponential", "rate0": 3.0, "rate1": 1.0}],
      "fusion": {"L": 1, "N": 2},
      "mode": "secret"
    })";
    auto r = run_experiment(parse_config(text), {});
    const double risk = std::get<double>(table(r, "summary").rows[0][2]);

    auto g = LikelihoodModel::gaussian(0.5);
    auto e = LikelihoodModel::exponential(3.0, 1.0);
    const double step = 2e-3;
    std::vector<ErrorPair> a, b;
    for (double t = -3.0; t <= 4.0; t += step) a.push_back(local_error_pair(g, t));
    a.push_back({0.0, 1.0});
    for (double t = 0.0; t <= 8.0; t += step) b.push_back(local_error_pair(e, t));
    b.push_back({0.0, 1.0});  // never vote 1
    double best = kInf;
    for (const auto& x : a) {
        for (const auto& y : b) {
            auto team = oracle::team_errors_by_subsets({x, y}, 1);
            best = std::min(best, 0.6 * team.pI + 0.8 * team.pII);
        }
    }
    CHECK(risk <= best + 1e-12);
    CHECK(best - risk < 1e-5);
}

TEST_CASE("command line exit codes and outputs") {
    auto dir = scratch("exit");
    {
        std::ofstream(dir / "good.json") << kMajority;
        std::ofstream(dir / "bad.json") << "{\"schema_version\": 1, \"prior\": ";
    }
    CHECK(run_cli("--config " + (dir / "good.json").string() + " --out " + (dir / "a").string()) == 0);
    CHECK(run_cli("--config " + (dir / "good.json").string() + " --out " + (dir / "b").string() + " --jobs 3") == 0);
    CHECK(run_cli("--config " + (dir / "bad.json").string() + " --out " + (dir / "c").string()) == 2);
    CHECK(run_cli("--config " + (dir / "missing.json").string()) == 2);
    CHECK(run_cli("--preset nosuch --out " + (dir / "d").string()) == 2);
    CHECK(run_cli("--format xml --preset fig4") == 2);
    CHECK(run_cli("") == 2);

    for (const auto& f : {"summary.csv", "thresholds.csv", "roc.csv", "montecarlo.csv"}) {
        REQUIRE(fs::exists(dir / "a" / f));
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    }
    CHECK(slurp(dir / "a" / "roc.csv").rfind("weight,pe1,pe2,risk,mode,ordering\n", 0) == 0);

    CHECK(run_cli("--config " + (dir / "good.json").string() + " --seed 6 --format json --out " +
                  (dir / "e").string()) == 0);
    CHECK(fs::exists(dir / "e" / "roc.json"));
    CHECK(slurp(dir / "e" / "montecarlo.json").find("\"seed\": \"6\"") != std::string::npos);

    CHECK(run_cli("--preset fig4 --out " + (dir / "f").string()) == 0);
    CHECK(slurp(dir / "f" / "checks.csv").find(",0,") == std::string::npos);
    CHECK(std::system(("VOTEFUSION_FORMAT=json " + std::string(VOTEFUSION_BIN) + " --preset fig4 --out " +
                       (dir / "g").string() + " > /dev/null")
                          .c_str()) == 0);
    CHECK(fs::exists(dir / "g" / "belief_only.json"));
    fs::remove_all(dir);
}
