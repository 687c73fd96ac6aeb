#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("lyap_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& contents) const {
    const auto p = path / name;
    std::ofstream(p) << contents;
    return p.string();
  }
};

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "lyap");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = lyap::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kRotationConfig = R"({
  "system": {"type": "rotation"},
  "point": {"chart": "circle", "theta": 1.0},
  "delta_list": [0.1, 0.01],
  "n_max": 6,
  "candidates": 256
})";

}  // namespace

TEST_CASE("point exponents of a rotation from a config file") {
  TempDir d;
  const auto cfg = d.file("rot.json", kRotationConfig);
  const auto csv = (d.path / "rows.csv").string();
  const auto plots = (d.path / "plots").string();
  const auto r = run({"point-exponents", "--config", cfg, "--csv", csv, "--plot-dir", plots});
  REQUIRE(r.code == 0);
  const auto doc = json::parse(r.out);
  for (const char* k : {"Lambda_plus", "lambda_plus", "Lambda_minus", "lambda_minus"}) {
    CHECK(std::abs(doc[k].get<double>()) < 1e-9);
  }
  CHECK(doc["runs"].size() == 2);

  const std::string rows = slurp(csv);
  CHECK(rows.rfind("system,point,delta,n,A_hat,a_hat,logA_over_n,loga_over_n\n", 0) == 0);
  CHECK(std::count(rows.begin(), rows.end(), '\n') == 1 + 2 * 12);
  CHECK(fs::exists(fs::path(plots) / "delta_0.1.dat"));
  CHECK(fs::exists(fs::path(plots) / "delta_0.01.dat"));
  const std::string plot = slurp(fs::path(plots) / "delta_0.1.dat");
  CHECK(plot.rfind("-1 ", 0) == 0);
}

TEST_CASE("flags override the config") {
  TempDir d;
  const auto cfg = d.file("rot.json", kRotationConfig);
  const auto r = run({"point-exponents", "--config", cfg, "--delta-list", "0.05", "--n-max", "4"});
  REQUIRE(r.code == 0);
  const auto doc = json::parse(r.out);
  REQUIRE(doc["runs"].size() == 1);
  CHECK(doc["runs"][0]["delta"].get<double>() == 0.05);
}

TEST_CASE("JSON report can go to a file") {
  TempDir d;
  const auto cfg = d.file("rot.json", kRotationConfig);
  const auto out = (d.path / "report.json").string();
  const auto r = run({"point-exponents", "--config", cfg, "--out", out});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  CHECK(json::parse(slurp(out))["converged"].get<bool>());
}

TEST_CASE("config errors name the field and exit 2") {
  TempDir d;
  SUBCASE("malformed JSON") {
    const auto r = run({"point-exponents", "--config", d.file("bad.json", "{\"system\": ")});
    CHECK(r.code == 2);
    CHECK(r.err.find("config") != std::string::npos);
  }
  SUBCASE("wrong type") {
    const auto r = run({"point-exponents", "--config",
                        d.file("bad.json", R"({"system": {"type": "rotation"}, "n_max": "ten"})")});
    CHECK(r.code == 2);
    CHECK(r.err.find("n_max") != std::string::npos);
  }
  SUBCASE("missing system type") {
    const auto r = run({"point-exponents", "--config",
                        d.file("bad.json", R"({"system": {}, "point": {"chart": "circle", "theta": 1}})")});
    CHECK(r.code == 2);
    CHECK(r.err.find("system.type") != std::string::npos);
  }
  SUBCASE("increasing delta list") {
    const auto r = run({"point-exponents", "--config", d.file("rot.json", kRotationConfig), "--delta-list", "0.01,0.1"});
    CHECK(r.code == 2);
    CHECK(r.err.find("delta_list") != std::string::npos);
  }
  SUBCASE("adapted metric on a non-toral system") {
    const auto r = run({"point-exponents", "--config",
                        d.file("ns.json", R"({"system": {"type": "north_south"}, "metric": "adapted",
                                              "point": {"chart": "circle", "theta": 1}})")});
    CHECK(r.code == 2);
    CHECK(r.err.find("metric") != std::string::npos);
  }
  SUBCASE("point outside the space") {
    const auto r = run({"point-exponents", "--config",
                        d.file("p.json", R"({"system": {"type": "toral"}, "point": {"chart": "circle", "theta": 1}})")});
    CHECK(r.code == 2);
    CHECK(r.err.find("point.chart") != std::string::npos);
  }
}

TEST_CASE("usage errors exit 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"reproduce", "no-such-preset"}).code == 2);
  CHECK(run({"point-exponents", "--n-max", "abc"}).code == 2);
}

TEST_CASE("an empty Bowen sample exits 3") {
  TempDir d;
  const auto cfg = d.file("t.json", R"({"system": {"type": "toral"}, "metric": "adapted", "probes": false,
                                       "point": {"chart": "torus", "u": 0.3, "v": 0.7},
                                       "delta_list": [0.001], "n_max": 10, "candidates": 64})");
  const auto r = run({"point-exponents", "--config", cfg});
  CHECK(r.code == 3);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("set exponents and classification") {
  TempDir d;
  const auto cfg = d.file("ns.json", R"({"system": {"type": "north_south", "mu": 2.0},
                                        "set": {"kind": "points", "points": [{"chart": "circle", "theta": 3.141592653589793}]},
                                        "candidates": 512})");
  const auto csv = (d.path / "set.csv").string();
  const auto r = run({"classify", "--config", cfg, "--csv", csv});
  REQUIRE(r.code == 0);
  const auto doc = json::parse(r.out);
  CHECK(doc["label"] == "Attractor");
  CHECK(doc["basin_fraction"].get<double>() >= 0.99);
  CHECK(slurp(csv).rfind("system,set,delta,n,A_hat,a_hat\n", 0) == 0);

  const auto bad = d.file("bad.json", R"({"system": {"type": "north_south"},
                                         "set": {"kind": "points", "points": [{"chart": "circle", "theta": 1.0}]}})");
  const auto rb = run({"set-exponents", "--config", bad});
  CHECK(rb.code == 2);
  CHECK(rb.err.find("set.points") != std::string::npos);
}

TEST_CASE("adapted metric check") {
  TempDir d;
  const auto r = run({"adapted-metric-check", "--config", d.file("t.json", R"({"system": {"type": "toral"}})"),
                      "--pairs", "500", "--metric", "adapted"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["violations"] == 0);
  const auto flat = run({"adapted-metric-check", "--config", d.file("f.json", R"({"system": {"type": "toral"}})"),
                         "--pairs", "500"});
  REQUIRE(flat.code == 0);
  CHECK(json::parse(flat.out)["violations"] > 0);
}

TEST_CASE("compare-classical rejects systems without a derivative") {
  TempDir d;
  const auto cfg = d.file("h.json", R"({"system": {"type": "torus_with_hair"}, "point": {"chart": "hair", "t": 0}})");
  const auto r = run({"compare-classical", "--config", cfg});
  CHECK(r.code == 2);
  CHECK(r.err.find("system.type") != std::string::npos);
}

TEST_CASE("reproduce hair point preset") {
  TempDir d;
  const auto r = run({"reproduce", "thm2.7-hair-point", "--plot-dir", (d.path / "p").string()});
  REQUIRE(r.code == 0);
  const auto doc = json::parse(r.out);
  CHECK(doc["pass"].get<bool>());
  CHECK(doc["Lambda_plus"].get<double>() < 0.0);
  CHECK(fs::exists(d.path / "p" / "delta_0.001.dat"));
}
