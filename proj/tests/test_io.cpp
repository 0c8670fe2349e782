#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "mqt/errors.hpp"
#include "mqt/io.hpp"
#include "support.hpp"

using namespace mqt;
using io::json;

namespace {

ParseError parse_failure(const std::string& text) {
  try {
    (void)io::parse_curve_spec(text);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("expected a parse error for: " << text);
  return ParseError("", "");
}

}  // namespace

TEST_CASE("measure and coupling JSON round trips") {
  testing::Rng rng(91);
  for (int trial = 0; trial < 50; ++trial) {
    const auto mu = testing::random_measure(rng, 6, false), nu = testing::random_measure(rng, 6, false);
    const auto back = io::measure_from_json(json::parse(io::to_json(mu).dump()));
    CHECK(approx_equal(back, mu, 0.0));
    const auto p = testing::random_plan(rng, mu, nu);
    const auto q = io::coupling_from_json(json::parse(io::to_json(p).dump()));
    CHECK(std::equal(q.mass().begin(), q.mass().end(), p.mass().begin(), p.mass().end()));
  }
  CHECK_THROWS_AS(io::measure_from_json(json::parse(R"({"positions": [0]})")), ParseError);
  CHECK_THROWS_AS(io::measure_from_json(json::parse(R"({"positions": [0, 1], "masses": [0.5, 0.4]})")), ParseError);
  CHECK_THROWS_AS(io::measure_from_json(json::parse(R"({"positions": ["a"], "masses": [1]})")), ParseError);
}

TEST_CASE("report JSON") {
  const auto rep = io::to_json(energy(MarginalCurve::translation(8), 1e-12));
  CHECK(rep["refined_value"].get<double>() == doctest::Approx(1.0));
  CHECK(rep["converged"].get<bool>());
  CHECK(rep["trace"].is_array());
  const auto tr = io::to_json(mq_coupling_trace(MarginalCurve::split_merge(4), 0.0, 1.0));
  CHECK(tr["coupling"]["mass"].size() == 2);
  CHECK(tr["converged"].get<bool>());
}

TEST_CASE("curve specs for every kind") {
  const auto tr = io::parse_curve_spec(R"({"kind": "translation", "levels": 8, "params": {"velocity": -2}})");
  CHECK(tr.kind() == CurveKind::translation);
  CHECK(tr.level_count() == 8);
  CHECK(tr.quantile(1.0, 0.5) == doctest::Approx(-1.5));

  CHECK(io::parse_curve_spec(R"({"kind": "scaling"})").level_count() == 64);
  CHECK(io::parse_curve_spec(R"({"kind": "split_merge", "levels": 4})").special_times().size() == 1);
  CHECK(io::parse_curve_spec(R"({"kind": "moving_point"})").marginal_at(0.5).size() == 1);

  const auto cst = io::parse_curve_spec(
      R"({"kind": "constant", "levels": 4, "params": {"measure": {"positions": [0, 1], "masses": [0.5, 0.5]}}})");
  CHECK(cst.marginal_at(0.7).size() == 2);

  const auto g = io::parse_curve_spec(R"({"kind": "grid", "times": [0, 0.5, 1], "levels": [0.5, 1],
      "values": [[0, 1], [0.5, 0.5], [0, 1]], "level_count": 8, "special_times": [0.25]})");
  CHECK(g.kind() == CurveKind::grid);
  CHECK(g.level_count() == 8);
  CHECK(g.marginal_at(0.5).size() == 1);
  CHECK(g.special_times().size() == 2);
}

TEST_CASE("curve spec errors name the field and line") {
  const auto syntax = parse_failure("{\n  \"kind\": \"translation\",\n  \"levels\": 8,,\n}");
  CHECK(syntax.line() == 3);

  const auto unknown = parse_failure("{\n  \"kind\": \"spiral\"\n}");
  CHECK(unknown.field() == "kind");
  CHECK(unknown.line() == 2);

  const auto levels = parse_failure("{\n  \"kind\": \"translation\",\n  \"levels\": 0.5\n}");
  CHECK(levels.field() == "levels");
  CHECK(levels.line() == 3);

  const auto param = parse_failure("{\"kind\": \"scaling\",\n\"params\": {\"rate\": \"fast\"}}");
  CHECK(param.field() == "params.rate");
  CHECK(param.line() == 2);

  const auto rows = parse_failure(
      "{\"kind\": \"grid\", \"times\": [0, 1], \"levels\": [0.5, 1],\n \"values\": [[1, 0], [0, 1]]}");
  CHECK(rows.field() == "values");
  CHECK(rows.line() == 2);

  CHECK(parse_failure(R"({"kind": "grid", "times": [0, 1]})").field() == "levels");
  CHECK(parse_failure(R"([1, 2])").line() == 1);
  CHECK(parse_failure(R"({"levels": 4})").field() == "kind");
  CHECK(parse_failure(R"({"kind": "split_merge", "special_times": [2]})").field() == "special_times");
}

TEST_CASE("paths CSV round trip") {
  const auto paths = sample_paths(MarginalCurve::split_merge(8), TimePartition({0.0, 0.5, 1.0}), 20, 3, 6);
  const auto text = io::paths_csv(paths);
  CHECK(text.rfind("path_id,t,x\n", 0) == 0);
  const auto back = io::parse_paths_csv(text);
  CHECK(back.n_paths == paths.n_paths);
  CHECK(back.times == paths.times);
  CHECK(back.positions == paths.positions);

  CHECK_THROWS_AS(io::parse_paths_csv("id,t,x\n0,0,1\n"), ParseError);
  CHECK_THROWS_AS(io::parse_paths_csv("path_id,t,x\n0,0,1\n2,0,1\n"), ParseError);
  CHECK_THROWS_AS(io::parse_paths_csv("path_id,t,x\n0,0,1\n0,1,1\n1,0,1\n1,0.5,1\n"), ParseError);
}

TEST_CASE("generic CSV") {
  const io::CsvTable t{{"a", "b"}, {{0.1, -2.0}, {1e-300, 3.0}}};
  const auto back = io::parse_csv(io::to_csv(t));
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  try {
    (void)io::parse_csv("a,b\n1,2\n3\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  try {
    (void)io::parse_csv("a,b\n1,x\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.field() == "b");
  }
  CHECK_THROWS_AS(io::parse_csv(""), ParseError);
}

TEST_CASE("atomic writes and file reads") {
  const auto dir = std::filesystem::temp_directory_path() / "mqt_test_io";
  std::filesystem::create_directories(dir);
  const auto file = dir / "out.json";
  io::write_atomic(file, "first");
  io::write_atomic(file, "second");
  CHECK(io::read_file(file) == "second");
  CHECK_FALSE(std::filesystem::exists(dir / "out.json.tmp"));

  {
    std::ofstream(dir / "spec.json") << R"({"kind": "constant", "levels": 4})";
  }
  CHECK(io::load_curve_spec(dir / "spec.json").level_count() == 4);
  CHECK_THROWS_AS(io::read_file(dir / "missing.json"), ParseError);
  std::filesystem::remove_all(dir);
}
