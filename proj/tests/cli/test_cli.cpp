#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "glpin/cli/commands.hpp"
#include "glpin/cli/config.hpp"

namespace fs = std::filesystem;
using namespace glpin;
using namespace glpin::cli;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("glpin_cli_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return path / name;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Captured {
  int code = 0;
  std::string out, err;
};

Captured call(const std::vector<std::string>& args) {
  std::ostringstream o, e;
  auto* ob = std::cout.rdbuf(o.rdbuf());
  auto* eb = std::cerr.rdbuf(e.rdbuf());
  std::vector<std::string> a{"glpin"};
  a.insert(a.end(), args.begin(), args.end());
  Captured c;
  c.code = run(a);
  std::cout.rdbuf(ob);
  std::cerr.rdbuf(eb);
  c.out = o.str();
  c.err = e.str();
  return c;
}

const char* kSmall = R"({
  "resolution": 48,
  "pinning": {"epsilon": 0.06, "lambda": 0.8},
  "fields": {"n_theta": 48, "micro_search": 3, "kII_count": 1, "Rhat": 100, "rhat": 0.01}
})";

}  // namespace

TEST_CASE("config validation reports field and line") {
  CHECK_NOTHROW(parse_config("{}"));
  try {
    parse_config("{\n  \"resolution\": 64,\n  \"pinning\": {\n    \"epsilon\": -0.1\n  }\n}", "cfg.json");
    FAIL("no error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()) == "cfg.json:4: pinning.epsilon: must be positive");
  }
  CHECK_THROWS_AS(parse_config(R"({"resolutoin": 64})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"resolution": 8})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"pinning": {"b": 1.5}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"sweep": {"from": 5, "to": 1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"seed_vortices": [{"x": 3, "y": 0}]})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"minimize": {"method": "newton"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config("{ not json"), ConfigError);
  const RunConfig c = parse_config(R"({"pinning": {"epsilon": 0.02}, "sweep": {"from": 1, "to": 2, "steps": 3}})");
  CHECK(c.pinning.epsilon == 0.02);
  CHECK(c.sweep->values() == std::vector<double>{1.0, 1.5, 2.0});
}

TEST_CASE("config hash follows the document") {
  const RunConfig a = parse_config(R"({"resolution": 64, "hex": 3})");
  const RunConfig b = parse_config("{ \"hex\": 3,\n \"resolution\": 64 }");
  const RunConfig c = parse_config(R"({"resolution": 64, "hex": 4})");
  CHECK(a.hash == b.hash);
  CHECK(a.hash != c.hash);
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("exit codes") {
  TempDir t;
  CHECK(call({"london"}).code == 1);
  CHECK(call({"london", "--config", (t.path / "missing.json").string()}).code == 1);
  const auto bad = t.write("bad.json", "{\n  \"resolution\": 0\n}\n");
  const Captured c = call({"london", "--config", bad.string()});
  CHECK(c.code == 1);
  CHECK(c.err.find("bad.json:2: resolution") != std::string::npos);
  CHECK(call({"no-such-command"}).code == 1);
}

TEST_CASE("london and pinning artifacts are deterministic") {
  TempDir t;
  const auto cfg = t.write("c.json", kSmall);
  REQUIRE(call({"london", "--config", cfg.string(), "--out", (t.path / "a").string()}).code == 0);
  REQUIRE(call({"london", "--config", cfg.string(), "--out", (t.path / "b").string()}).code == 0);
  CHECK(slurp(t.path / "a/london.json") == slurp(t.path / "b/london.json"));
  CHECK(slurp(t.path / "a/xi0.bin") == slurp(t.path / "b/xi0.bin"));
  const json j = json::parse(slurp(t.path / "a/london.json"));
  for (const char* k : {"lambda_set", "hessians", "xi0_inf_norm", "M_omega", "J0", "config_hash", "version"})
    CHECK(j.contains(k));
  CHECK(j["config_hash"] == load_config(cfg).hash);
  CHECK(j["version"] == toolkit_version());
  REQUIRE(call({"pinning", "--config", cfg.string(), "--out", (t.path / "p").string()}).code == 0);
  CHECK(fs::exists(t.path / "p/U.bin"));
  CHECK(fs::exists(t.path / "p/a.bin"));
}

TEST_CASE("renormalised energy subcommands") {
  TempDir t;
  const auto cfg = t.write("c.json", kSmall);
  const auto v = t.write("v.json", R"([{"x": 0.0, "y": 0.0, "degree": 1}])");
  const Captured m = call({"renorm-macro", "--config", cfg.string(), "--seed-vortices", v.string()});
  REQUIRE(m.code == 0);
  const json jm = json::parse(m.out);
  CHECK(std::abs(jm["value"].get<double>()) <= 1e-6);
  const Captured s = call({"renorm-meso", "--config", cfg.string(), "--degree", "2", "--q", "1", "0", "1"});
  REQUIRE(s.code == 0);
  const json js = json::parse(s.out);
  for (const char* k : {"value", "minimizer", "diagnostics"}) CHECK(js.contains(k));
  CHECK(js["minimizer"].size() == 2);
  CHECK(call({"renorm-meso", "--config", cfg.string(), "--degree", "0"}).code == 1);
  CHECK(call({"renorm-micro", "--config", cfg.string(), "--x0", "0.9", "0"}).code == 1);
}

TEST_CASE("fields and predict") {
  TempDir t;
  const auto cfg = t.write("c.json", kSmall);
  REQUIRE(call({"fields", "--config", cfg.string(), "--out", t.path.string()}).code == 0);
  const json l = json::parse(slurp(t.path / "ladder.json"));
  for (const char* k : {"H0c1", "Hc1", "KI", "KII", "dstar", "wbar"}) CHECK(l.contains(k));
  const double hc1 = l["Hc1"].get<double>();
  const Captured lo = call({"predict", "--config", cfg.string(), "--hex", std::to_string(0.5 * hc1)});
  REQUIRE(lo.code == 0);
  const json p = json::parse(lo.out);
  CHECK(p["d"] == 0);
  CHECK(p.size() == 3);
  const Captured hi = call({"predict", "--config", cfg.string(), "--hex", std::to_string(1.02 * hc1)});
  CHECK(json::parse(hi.out)["d"] == 1);
  CHECK(json::parse(hi.out)["degrees"] == json::array({json::array({1})}));
}

TEST_CASE("simulate, analyze and check-decomposition") {
  TempDir t;
  const auto cfg = t.write("c.json", kSmall);
  const auto v = t.write("v.json", R"([{"x": 0.02, "y": 0.01}])");
  const std::string out = (t.path / "run").string();
  REQUIRE(call({"simulate", "--config", cfg.string(), "--hex", "14", "--seed-vortices", v.string(), "--out", out}).code ==
          0);
  for (const char* f : {"run.json", "trace.csv", "v.bin", "v.json", "A_ax.bin", "A_ay.bin", "U.bin"})
    CHECK(fs::exists(t.path / "run" / f));
  const json r = json::parse(slurp(t.path / "run/run.json"));
  CHECK(r["hex"] == 14.0);
  CHECK(r["minimize"]["converged"] == true);
  CHECK(slurp(t.path / "run/trace.csv").rfind("sweep,energy,min_abs_v\n", 0) == 0);

  REQUIRE(call({"analyze", "--config", cfg.string(), "--run", out}).code == 0);
  const json rep = json::parse(slurp(t.path / "run/report.json"));
  CHECK(rep["defects"].size() == 1);
  CHECK(rep["total_degree"] == 1);
  CHECK(json::parse(slurp(t.path / "run/compare.json")).contains("comparison"));
  const std::string first = slurp(t.path / "run/report.json");
  REQUIRE(call({"analyze", "--config", cfg.string(), "--run", out, "--no-compare"}).code == 0);
  CHECK(slurp(t.path / "run/report.json") == first);

  REQUIRE(call({"check-decomposition", "--config", cfg.string(), "--run", out}).code == 0);
  const json d = json::parse(slurp(t.path / "run/decomposition.json"));
  CHECK(d["vortices"].size() == 1);
  CHECK(d["relative"].get<double>() < 0.25);
  CHECK(call({"analyze", "--config", cfg.string(), "--run", (t.path / "nothing").string()}).code == 1);
}

TEST_CASE("sweep writes the staircase table") {
  TempDir t;
  const auto cfg = t.write("c.json", R"({
    "resolution": 48,
    "pinning": {"epsilon": 0.06, "lambda": 0.8},
    "fields": {"n_theta": 48, "micro_search": 3, "kII_count": 1, "Rhat": 100, "rhat": 0.01},
    "sweep": {"from": 2, "to": 16, "steps": 2}
  })");
  REQUIRE(call({"sweep", "--config", cfg.string(), "--out", t.path.string()}).code == 0);
  std::istringstream csv(slurp(t.path / "sweep.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "hex,d_observed,d_predicted,energy,min_abs_v");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 2);
  CHECK(fs::exists(t.path / "run_000/run.json"));
  CHECK(fs::exists(t.path / "run_001/report.json"));
  CHECK(call({"sweep", "--config", t.write("n.json", "{}").string()}).code == 1);
}
