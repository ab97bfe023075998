#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#include "config.hpp"
#include "csv.hpp"
#include "experiment_config.hpp"
#include "fpp/error.hpp"
#include "fpp/word_metric.hpp"
#include "runner.hpp"

using namespace fpp;
using namespace fpp::cli;

namespace {

ExperimentConfig valid(const std::string& text) {
  Validation v = validate_config(RawConfig::parse(text));
  std::string problems;
  for (const auto& violation : v.violations) problems += violation.message() + "\n";
  INFO(problems);
  REQUIRE(v.ok());
  return v.config;
}

std::vector<Violation> violations(const std::string& text) { return validate_config(RawConfig::parse(text)).violations; }

bool mentions(const std::vector<Violation>& vs, const std::string& key, const std::string& fragment) {
  for (const auto& v : vs) {
    if (v.key == key && v.message().find(fragment) != std::string::npos) return true;
  }
  return false;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("fpp-cli-test-" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

const char* kHeisenbergBall = R"(
experiment = ball
group = heisenberg
distribution = uniform
a = 1
b = 2
radius = 4
seed = 7
)";

}  // namespace

TEST_CASE("config grammar") {
  const RawConfig c = RawConfig::parse(R"(# comment
int = -12
real = 2.5e-3
yes = true
word = two-point
quoted = "a \"b\"\n" # trailing comment
list = [1, [2, 3], "x"]
empty = []
)");
  CHECK(c.find("int")->value.type == Value::Type::Integer);
  CHECK(c.find("int")->value.text == "-12");
  CHECK(c.find("real")->value.type == Value::Type::Real);
  CHECK(c.find("yes")->value.type == Value::Type::Boolean);
  CHECK(c.find("yes")->value.boolean);
  CHECK(c.find("word")->value.type == Value::Type::String);
  CHECK(c.find("word")->value.text == "two-point");
  CHECK(c.find("quoted")->value.text == "a \"b\"\n");
  CHECK(c.find("list")->value.items.size() == 3);
  CHECK(c.find("list")->value.items[1].items[1].text == "3");
  CHECK(c.find("empty")->value.items.empty());
  CHECK(c.find("list")->line == 7);
  CHECK(c.find("missing") == nullptr);
}

TEST_CASE("config syntax errors name the line and key") {
  auto error_of = [](const std::string& text) -> std::string {
    try {
      RawConfig::parse(text);
    } catch (const ConfigError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(error_of("a = 1\na = 2\n").find("line 2, key 'a'") != std::string::npos);
  CHECK(error_of("x = [1, 2\n").find("line 1") != std::string::npos);
  CHECK(error_of("novalue\n").find("line 1") != std::string::npos);
  CHECK(error_of("k = \"open\n").find("key 'k'") != std::string::npos);
  CHECK(error_of("1bad = 3\n").find("line 1") != std::string::npos);
}

TEST_CASE("validate examples") {
  const auto zero_atom = violations(R"(
experiment = ball
group = z
d = 2
distribution = two-point
a = 0
b = 1
p = 0.5
radius = 3
)");
  CHECK(mentions(zero_atom, "distribution", "nu({0}) >= 1/degree"));

  const auto ok = validate_config(RawConfig::parse(R"(
experiment = shape-scan
group = heisenberg
distribution = two-point
a = 1
b = 2
p = 0.5
r = 1
n_grid = [8, 16, 24, 32]
)"));
  CHECK(ok.ok());

  CHECK(mentions(violations("experiment = ball\ngroup = z\nd = 2\ndistribution = uniform\na = 1\nb = 2\nradius = -1\n"),
                 "radius", ""));
  CHECK(mentions(violations("experiment = ball\ngroup = z\nd = 2\ndistribution = uniform\na = 1\nb = 2\nradius = 1\ncolour = 3\n"),
                 "colour", "unknown key"));
  CHECK(mentions(violations("experiment = distance\ngroup = z\nd = 2\ndistribution = uniform\na = 1\nb = 2\nx = [0, 0]\n"),
                 "y", "missing"));
  CHECK(mentions(violations("experiment = ball\ngroup = heisenberg\nd = 2\ndistribution = uniform\na = 1\nb = 2\nradius = 1\n"),
                 "d", "applies only"));
  CHECK(mentions(violations("experiment = ball\ngroup = z\nd = 2\ndistribution = uniform\na = 1\nb = 2\nrate = 3\nradius = 1\n"),
                 "rate", "does not apply"));
  CHECK(mentions(violations("experiment = frobnicate\n"), "experiment", "unknown experiment"));
  CHECK(mentions(violations("experiment = distance\ngroup = z\nd = 2\ndistribution = uniform\na = 1\nb = 2\nx = [0, 0]\ny = [1, 2, 3]\n"),
                 "y", ""));
}

TEST_CASE("mean-ratio gating is surfaced by validate") {
  const auto vs = violations(R"(
experiment = mean-ratio
group = tree
degree = 3
distribution = two-point
a = 1
b = 2
p = 0.5
pairs = 10
)");
  CHECK(mentions(vs, "distribution", "nu({a}) >= 1/q"));
}

TEST_CASE("elements from config values") {
  CHECK(element_from_value(GroupSpec::lattice(1), RawConfig::parse("x = 4").find("x")->value) == lattice_point({4}));
  CHECK(element_from_value(GroupSpec::heisenberg(), RawConfig::parse("x = [1, 2, 3]").find("x")->value) ==
        heisenberg_element(1, 2, 3));
  CHECK(element_from_value(GroupSpec::tree(3), RawConfig::parse("x = \"0.1.2\"").find("x")->value) == tree_word({0, 1, 2}));
  CHECK(element_from_value(GroupSpec::tree(3), RawConfig::parse("x = e").find("x")->value) == tree_word({}));
  CHECK_THROWS_AS(element_from_value(GroupSpec::tree(3), RawConfig::parse("x = [0, 3]").find("x")->value), InvalidArgument);
}

TEST_CASE("csv formatting") {
  CsvTable t({"a", "b"});
  t.row().add("plain").add(0.1);
  t.row().add("has,comma").add(std::int64_t{-3});
  t.row().add("has \"quote\"").add(true);
  CHECK(t.str() == "a,b\r\nplain,0.10000000000000001\r\n\"has,comma\",-3\r\n\"has \"\"quote\"\"\",true\r\n");
  t.row().add("short");
  CHECK_THROWS_AS(t.str(), std::logic_error);
}

TEST_CASE("ball run matches the BFS oracle") {
  ExperimentConfig c = valid(kHeisenbergBall);
  const ExperimentResult r = execute(c);
  REQUIRE(r.tables.size() == 1);
  const CsvTable& t = r.tables[0].table;
  CHECK(t.header().size() == 5);
  CHECK(t.rows() == word_ball(GroupSpec::heisenberg(), heisenberg_element(0, 0, 0), 4).size());
}

TEST_CASE("distance run") {
  ExperimentConfig c = valid("experiment = distance\ngroup = z\nd = 1\ndistribution = deterministic\nweight = 1\nx = 0\ny = 5\n");
  const ExperimentResult r = execute(c);
  CHECK(r.summary["time"].get<double>() == 5.0);
}

TEST_CASE("runs are reproducible and every output is in the manifest") {
  const auto dir = scratch_dir("repro");
  ExperimentConfig c = valid(kHeisenbergBall);
  c.out = (dir / "first" / "ball").string();
  const RunOutcome a = run(c, false);
  c.out = (dir / "second" / "ball").string();
  c.workers = 3;
  const RunOutcome b = run(c, false);
  CHECK(a.exit_code == kExitOk);
  CHECK(slurp((dir / "first" / "ball.csv").string()) == slurp((dir / "second" / "ball.csv").string()));
  CHECK(a.manifest["inputs_hash"] == b.manifest["inputs_hash"]);
  CHECK(a.manifest["outputs"][0]["content_hash"] == b.manifest["outputs"][0]["content_hash"]);

  std::size_t listed = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir / "first")) {
    const std::string name = entry.path().string();
    if (name.ends_with(".manifest.json")) continue;
    bool found = false;
    for (const auto& o : a.manifest["outputs"]) found = found || o["file"].get<std::string>() == name;
    CHECK(found);
    ++listed;
  }
  CHECK(listed == a.manifest["outputs"].size());

  ExperimentConfig other = valid(kHeisenbergBall);
  other.raw.set("seed", make_integer(8));
  other.seed = 8;
  CHECK(inputs_hash(other) != inputs_hash(c));
  std::filesystem::remove_all(dir);
}

TEST_CASE("assertion mode maps failures to exit code 4") {
  const auto dir = scratch_dir("assert");
  ExperimentConfig c = valid(R"(
experiment = gh-check
group = z
d = 2
distribution = two-point
a = 1
b = 2
p = 0.5
n = 16
eps = 0.001
pairs = 30
replicas = 20
)");
  c.out = (dir / "ratio").string();
  const RunOutcome quiet = run(c, false);
  CHECK(quiet.exit_code == kExitOk);
  const RunOutcome strict = run(c, true);
  CHECK(strict.exit_code == kExitAssertion);
  CHECK(strict.manifest["status"] == "assertion-failed");
  std::filesystem::remove_all(dir);
}
