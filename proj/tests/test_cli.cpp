#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pullback/runner.hpp"

using namespace pullback;
using namespace pullback::cli;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("pullback-cli-test-" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string write_scenario(const fs::path& dir, const std::string& name,
                           const std::string& body) {
    const auto file = dir / name;
    std::ofstream out(file);
    out << body;
    return file.string();
}

int run_cli(const std::vector<std::string>& args, std::string* captured = nullptr) {
    std::ostringstream out, err;
    const int code = cli_main(args, out, err);
    if (captured) *captured = out.str() + err.str();
    return code;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kPlanarScenario = R"json({
  "seed": 11,
  "system": {"name": "planar-ode"},
  "schedule": {"type": "linear", "step": 1.0, "steps": 10},
  "diagnostics": [
    {"kind": "dissipativity",
     "name": "box-not-absorbing",
     "params": {
       "candidate": {"times": [0.0],
                     "set": {"type": "grid", "min": [0.0, 0.0], "max": [1.0, 1.0],
                              "shape": [21, 21], "label": "B_M"}},
       "test_sets": [{"type": "grid", "min": [0.0, 2.0], "max": [1.0, 2.0],
                       "shape": [21, 1], "label": "K_M"}],
       "times": [0.0]},
     "expected": {"absorbing": false, "point_dissipative": true}}
  ]
})json";

}  // namespace

TEST_CASE("cli: version and usage") {
    std::string text;
    CHECK(run_cli({"version"}, &text) == kExitOk);
    CHECK(text.find(kToolkitVersion) != std::string::npos);

    CHECK(run_cli({"frobnicate"}, &text) == kExitSchema);
    CHECK(text.find("usage") != std::string::npos);

    CHECK(run_cli({}, &text) == kExitSchema);
}

TEST_CASE("cli: list-systems names the registry in stable order") {
    std::string text;
    CHECK(run_cli({"list-systems"}, &text) == kExitOk);
    for (const char* name : {"drift", "shift", "planar-ode", "heat-switch", "inclusion"})
        CHECK(text.find(name) != std::string::npos);
    CHECK(text.find("drift") < text.find("shift"));
    CHECK(text.find("shift") < text.find("planar-ode"));
    CHECK(text.find("planar-ode") < text.find("heat-switch"));
    CHECK(text.find("heat-switch") < text.find("inclusion"));

    std::string js;
    CHECK(run_cli({"list-systems", "--json"}, &js) == kExitOk);
    const auto parsed = json::parse(js);
    REQUIRE(parsed.is_array());
    CHECK(parsed[0]["name"] == "drift");
}

TEST_CASE("cli: malformed JSON exits with the schema code") {
    TempDir tmp;
    const auto path = write_scenario(tmp.path, "bad.json", "{ not json");
    CHECK(run_cli({"run", path}) == kExitSchema);
}

TEST_CASE("cli: schema violations exit with the schema code") {
    TempDir tmp;
    CHECK(run_cli({"run", (tmp.path / "missing.json").string()}) == kExitSchema);

    const auto no_seed = write_scenario(tmp.path, "no-seed.json",
                                        R"({"system": {"name": "drift"}, "diagnostics": []})");
    CHECK(run_cli({"run", no_seed}) == kExitSchema);

    const auto bad_system = write_scenario(
        tmp.path, "bad-system.json",
        R"({"seed": 1, "system": {"name": "nope"},
            "diagnostics": [{"kind": "omega-limit", "params": {}}]})");
    CHECK(run_cli({"run", bad_system}) == kExitSchema);

    const auto bad_kind = write_scenario(
        tmp.path, "bad-kind.json",
        R"({"seed": 1, "system": {"name": "drift"},
            "diagnostics": [{"kind": "frobnicate", "params": {}}]})");
    CHECK(run_cli({"run", bad_kind}) == kExitSchema);
}

TEST_CASE("cli: planar counterexample scenario matches its expected negatives") {
    TempDir tmp;
    const auto path = write_scenario(tmp.path, "planar.json", kPlanarScenario);
    const auto out = (tmp.path / "out").string();
    CHECK(run_cli({"run", path, "--output", out}) == kExitOk);

    const auto report = json::parse(read_file(fs::path(out) / "report.json"));
    CHECK(report["schema_version"] == 1);
    CHECK(report["all_matched"] == true);
    CHECK(report["diagnostics"][0]["verdicts"]["absorbing"] == false);
    CHECK(report["diagnostics"][0]["verdicts"]["point_dissipative"] == true);
    CHECK(fs::exists(fs::path(out) / "manifest.json"));
}

TEST_CASE("cli: verdict mismatch exits with code 1") {
    TempDir tmp;
    std::string body = kPlanarScenario;
    const auto at = body.find("\"absorbing\": false");
    body.replace(at, std::string("\"absorbing\": false").size(), "\"absorbing\": true");
    const auto path = write_scenario(tmp.path, "mismatch.json", body);
    CHECK(run_cli({"run", path, "--output", (tmp.path / "out").string()}) ==
          kExitVerdictMismatch);
}

TEST_CASE("cli: repeated runs produce byte-identical reports and curves") {
    TempDir tmp;
    const char* scenario = R"json({
      "seed": 3,
      "system": {"name": "heat-switch", "params": {"modes": 8}},
      "schedule": {"type": "geometric", "h": 1.0, "ratio": 1.5, "steps": 16},
      "diagnostics": [
        {"kind": "omega-limit", "name": "omega",
         "params": {"t": 0.0, "cluster_eps": 0.5,
                    "set": {"type": "ball", "radius": 2.0, "count": 16}},
         "expected": {"converged": true, "limit_size": 2}}
      ]
    })json";
    const auto path = write_scenario(tmp.path, "det.json", scenario);

    std::vector<std::string> reports, curves;
    for (int i = 0; i < 3; ++i) {
        const auto out = tmp.path / ("out-" + std::to_string(i));
        REQUIRE(run_cli({"run", path, "--output", out.string()}) == kExitOk);
        reports.push_back(read_file(out / "report.json"));
        curves.push_back(read_file(out / "curves" / "0-omega-omega-curve.csv"));
    }
    CHECK(reports[0] == reports[1]);
    CHECK(reports[1] == reports[2]);
    CHECK(curves[0] == curves[1]);
    CHECK(curves[1] == curves[2]);
    CHECK(!reports[0].empty());
    CHECK(json::parse(reports[0])["diagnostics"][0]["matched"] == true);
}

TEST_CASE("cli: seed override changes sampled sets deterministically") {
    TempDir tmp;
    const char* scenario = R"json({
      "seed": 3,
      "system": {"name": "heat-switch", "params": {"modes": 8}},
      "diagnostics": [
        {"kind": "omega-limit", "name": "omega",
         "params": {"t": 0.0, "cluster_eps": 0.5,
                    "set": {"type": "ball", "radius": 2.0, "count": 16}}}
      ]
    })json";
    const auto path = write_scenario(tmp.path, "seeded.json", scenario);
    const auto out_a = tmp.path / "a", out_b = tmp.path / "b", out_c = tmp.path / "c";
    REQUIRE(run_cli({"run", path, "--output", out_a.string(), "--seed", "7"}) == kExitOk);
    REQUIRE(run_cli({"run", path, "--output", out_b.string(), "--seed", "7"}) == kExitOk);
    REQUIRE(run_cli({"run", path, "--output", out_c.string(), "--seed", "8"}) == kExitOk);
    CHECK(read_file(out_a / "report.json") == read_file(out_b / "report.json"));
    CHECK(read_file(out_a / "curves" / "0-omega-omega-curve.csv") !=
          read_file(out_c / "curves" / "0-omega-omega-curve.csv"));
}

TEST_CASE("serialization: point clouds as CSV rows and JSON arrays") {
    const SampledSet s({StatePoint{1.0, -2.5}, StatePoint{0.25, 4.0}}, "S");
    CHECK(to_csv(s) == "1,-2.5\n0.25,4\n");
    CHECK(to_json(s).dump() == "[[1.0,-2.5],[0.25,4.0]]");

    const auto family = NonautonomousSet::constant({-1.0, 0.5}, SampledSet({StatePoint{3.0}}));
    const auto j = to_json(family);
    REQUIRE(j.is_object());
    CHECK(j.contains("-1"));
    CHECK(j.contains("0.5"));
    CHECK(j["0.5"].dump() == "[[3.0]]");

    CHECK(curve_csv({{1.0, 0.5}, {2.0, 0.25}}, "tau", "semidistance") ==
          "tau,semidistance\n1,0.5\n2,0.25\n");
}

TEST_CASE("cli: omega-limit runs persist the limit set as CSV") {
    TempDir tmp;
    const char* scenario = R"json({
      "seed": 4,
      "system": {"name": "heat-switch", "params": {"modes": 8}},
      "diagnostics": [
        {"kind": "omega-limit", "name": "omega",
         "params": {"t": 0.0, "cluster_eps": 0.5,
                    "set": {"type": "ball", "radius": 2.0, "count": 16}},
         "expected": {"limit_size": 2}}
      ]
    })json";
    const auto path = write_scenario(tmp.path, "sets.json", scenario);
    const auto out = tmp.path / "out";
    REQUIRE(run_cli({"run", path, "--output", out.string()}) == kExitOk);
    const auto csv = read_file(out / "sets" / "0-omega-limit-set.csv");
    // Two points, eight columns each.
    REQUIRE(!csv.empty());
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
    CHECK(std::count(csv.begin(), csv.end(), ',') == 2 * 7);
}

TEST_CASE("cli: svg plots are written next to each curve") {
    TempDir tmp;
    const char* scenario = R"json({
      "seed": 5,
      "system": {"name": "pure-heat", "params": {"modes": 4}},
      "diagnostics": [
        {"kind": "attraction", "name": "to-origin",
         "params": {"t": 0.0,
                    "family": {"times": [0.0],
                                "set": {"type": "points", "points": [[0, 0, 0, 0]]}},
                    "set": {"type": "ball", "radius": 1.0, "count": 8}},
         "expected": {"attracted": true}}
      ]
    })json";
    const auto path = write_scenario(tmp.path, "svg.json", scenario);
    const auto out = tmp.path / "out";
    REQUIRE(run_cli({"run", path, "--output", out.string()}) == kExitOk);
    const auto svg = read_file(out / "plots" / "0-to-origin-attraction-curve.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
}
