#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <unistd.h>

#include "bohr/report.hpp"
#include "bohr/runner.hpp"

using namespace bohr;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / ("bohr_report_test_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("canonical JSON sorts keys and prints 17 digits") {
  Json j;
  j["zeta"] = 1;
  j["alpha"] = Json::array({0.1, 2.0, -3});
  j["mid"] = {{"b", true}, {"a", "text"}};
  CHECK(canonical_json(j) == "{\"alpha\":[0.10000000000000001,2,-3],\"mid\":{\"a\":\"text\",\"b\":true},\"zeta\":1}\n");
  CHECK(canonical_json(Json(1.0 / 3.0)) == "0.33333333333333331\n");
  CHECK(canonical_json(Json::object()) == "{}\n");
}

TEST_CASE("property: canonical JSON round-trips doubles exactly") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> e(-300, 300);
  for (int i = 0; i < 1000; ++i) {
    const double x = std::pow(10.0, e(rng)) * (i % 2 ? -1 : 1);
    const Json back = Json::parse(canonical_json(Json{{"x", x}}));
    CHECK(back["x"].get<double>() == x);
  }
}

TEST_CASE("non-finite numbers are rejected") {
  CHECK_THROWS_AS(format_double(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
  CHECK_THROWS_AS(canonical_json(Json{{"a", std::numeric_limits<double>::infinity()}}), std::domain_error);
  CHECK_THROWS_AS(canonical_json(Json::array({1.0, -std::numeric_limits<double>::infinity()})), std::domain_error);
}

TEST_CASE("git blob ids") {
  // Values from `git hash-object`.
  CHECK(git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  CHECK(git_blob_sha1("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
  CHECK(git_blob_sha1(std::string("a\0b", 3)).size() == 40);
}

TEST_CASE("CSV quoting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("1;0") == "1;0");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
  CHECK(csv_record({"T", "re", "x,y"}) == "T,re,\"x,y\"\r\n");
  CHECK(csv_record({}) == "\r\n");
}

TEST_CASE("atomic writes") {
  const auto dir = scratch_dir();
  const auto path = dir / "out.json";
  write_atomic(path.string(), "first");
  CHECK(slurp(path) == "first");
  write_atomic(path.string(), "second");
  CHECK(slurp(path) == "second");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++entries;
  CHECK(entries == 1);
  CHECK_THROWS_AS(write_atomic((dir / "missing" / "x.json").string(), "x"), std::runtime_error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("parameter parsing") {
  CHECK(parse_param(ParamKind::integer, "12") == Json(12));
  CHECK(parse_param(ParamKind::real, "0.5") == Json(0.5));
  CHECK(parse_param(ParamKind::reals, "1,-2.5,3") == Json::array({1.0, -2.5, 3.0}));
  CHECK(parse_param(ParamKind::integers, "1,0") == Json::array({1, 0}));
  CHECK(parse_param(ParamKind::integer_rows, "1,0;0,1") == Json::array({Json::array({1, 0}), Json::array({0, 1})}));
  CHECK(parse_param(ParamKind::real_rows, "1,0.5;0,2") == Json::array({Json::array({1.0, 0.5}), Json::array({0.0, 2.0})}));
  CHECK(parse_param(ParamKind::text, "sl2-sym") == Json("sl2-sym"));
  CHECK_THROWS_AS(parse_param(ParamKind::integer, "1.5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_param(ParamKind::reals, "1,,2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_param(ParamKind::real, "abc"), std::invalid_argument);
}

TEST_CASE("run validates specs") {
  CHECK(commands() == std::vector<std::string>{"sweep", "vdc", "weyl", "kak", "remark1", "nilpotent"});
  CHECK_THROWS_AS(command_params("plot"), std::invalid_argument);
  CHECK_THROWS_AS(run({"plot"}), std::invalid_argument);
  CHECK_THROWS_AS(run({"kak", {{"n", 7}}}), std::invalid_argument);
  CHECK_THROWS_AS(run({"kak", {{"bogus", 1}}}), std::invalid_argument);
  CHECK_THROWS_AS(run({"sweep", {{"family", "sl2-sym"}, {"k", 9}, {"u", {1, 1}}}}), std::invalid_argument);
  CHECK_THROWS_AS(run({"sweep", {{"family", "sl2-sym"}, {"k", 1}, {"u", {1, 1}}, {"schedule", {5, 250}}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(run({"remark1", {{"N", 20'000'000}}}), std::invalid_argument);
  RunSpec bad_format{"kak", {{"count", 2}}};
  bad_format.format = "xml";
  CHECK_THROWS_AS(run(bad_format), std::invalid_argument);
}

TEST_CASE("report envelope") {
  const RunResult r = run({"kak", {{"n", 2}, {"count", 50}, {"seed", 3}}});
  CHECK(r.exit_code == 0);
  CHECK(r.verdict == "RECONSTRUCTION_PASSES");
  CHECK(r.report["schema_version"] == kSchemaVersion);
  CHECK(r.report["spec"]["command"] == "kak");
  CHECK(r.report["spec"]["params"]["count"] == 50);
  CHECK(r.report["spec"]["params"].contains("spread"));
  CHECK(r.report["input_hash"].get<std::string>().size() == 40);
  CHECK_FALSE(r.report.contains("timings"));

  const RunResult again = run({"kak", {{"n", 2}, {"count", 50}, {"seed", 3}}});
  CHECK(render(again, "json") == render(r, "json"));

  // Explicit defaults hash like omitted ones.
  const RunResult spelled = run({"kak", {{"n", 2}, {"count", 50}, {"seed", 3}, {"spread", 1.0}}});
  CHECK(spelled.report["input_hash"] == r.report["input_hash"]);
  const RunResult other = run({"kak", {{"n", 2}, {"count", 50}, {"seed", 4}}});
  CHECK(other.report["input_hash"] != r.report["input_hash"]);

  RunSpec timed{"kak", {{"n", 2}, {"count", 5}}};
  timed.timings = true;
  CHECK(run(timed).report.contains("timings"));

  const std::string csv = render(r, "csv");
  CHECK(csv.rfind("n,count,", 0) == 0);
  CHECK(csv.find("\r\n") != std::string::npos);
}

TEST_CASE("CSV schemas") {
  const RunResult weyl = run({"weyl", {{"alpha", {0.5}}, {"N", 100}, {"frequencies", {{1}, {2}}}}});
  CHECK(weyl.csv.rfind("m,n_points,re,im,modulus\r\n", 0) == 0);
  CHECK(weyl.exit_code == 2);
  const RunResult sweep = run({"sweep",
                               {{"family", "sl2-sym"},
                                {"k", 1},
                                {"v", {1, 0}},
                                {"u", {1, 1}},
                                {"schedule", {1, 2}},
                                {"n_k", 4},
                                {"nodes_per_unit_time", 10}}});
  CHECK(sweep.csv.rfind("T,re,im,modulus,std_error\r\n", 0) == 0);
  std::size_t rows = 0;
  for (std::size_t p = 0; (p = sweep.csv.find("\r\n", p)) != std::string::npos; p += 2) ++rows;
  CHECK(rows == 3);
}

TEST_CASE("worker count from the environment") {
  ::unsetenv("BOHR_LAB_WORKERS");
  CHECK(workers_from_env() == 1);
  ::setenv("BOHR_LAB_WORKERS", "3", 1);
  CHECK(workers_from_env() == 3);
  ::setenv("BOHR_LAB_WORKERS", "zero", 1);
  CHECK_THROWS_AS(workers_from_env(), std::invalid_argument);
  ::unsetenv("BOHR_LAB_WORKERS");
}
