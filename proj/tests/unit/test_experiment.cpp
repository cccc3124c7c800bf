#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "netmimo/experiment.hpp"

using namespace netmimo;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/netmimo_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("empty config keeps the documented defaults") {
  const ExperimentSpec spec = parse_config_text("{}");
  CHECK(spec.dims == std::array<int, 4>{3, 2, 3, 2});
  CHECK(spec.snr_list_db == std::vector<double>{0, 5, 10, 15, 20, 25});
  CHECK(spec.trials == 500);
  CHECK(spec.base_seed == 42);
  CHECK(spec.scheme_bd);
  CHECK(spec.scheme_proposed);
}

TEST_CASE("config validation names the offending field") {
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"dims": [2, 2, 3, 2]})"),
                       doctest::Contains("antennas"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"trials": 0})"),
                       doctest::Contains("trials"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"mystery": 1})"),
                       doctest::Contains("mystery"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"schemes": ["bd", "zf"]})"),
                       doctest::Contains("zf"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("not json"), std::invalid_argument);
}

TEST_CASE("config keys are applied and overridable") {
  ExperimentSpec spec = parse_config_text(
      R"({"snr_list_db": [0, 10, 20], "trials": 7, "base_seed": 5, "schemes": ["bd"]})");
  CHECK(spec.snr_list_db.size() == 3);
  CHECK(spec.trials == 7);
  CHECK(spec.base_seed == 5);
  CHECK(spec.scheme_bd);
  CHECK_FALSE(spec.scheme_proposed);

  SpecOverrides ovr;
  ovr.trials = 2;
  ovr.schemes = "bd,proposed";
  apply_overrides(spec, ovr);
  CHECK(spec.trials == 2);
  CHECK(spec.scheme_proposed);
}

TEST_CASE("snr to power conversion") {
  const ExperimentSpec spec = parse_config_text("{}");
  CHECK(spec.config_at(0.0).bs_power == doctest::Approx(1.0));
  CHECK(spec.config_at(10.0).bs_power == doctest::Approx(10.0));
  CHECK(spec.config_at(20.0).bs_power == doctest::Approx(100.0));
}

TEST_CASE("run_sweep emits one row per (trial, scheme) and aggregates them") {
  ExperimentSpec spec = parse_config_text(
      R"({"snr_list_db": [10], "trials": 1, "base_seed": 9})");
  const SweepResult result = run_sweep(spec);
  REQUIRE(result.rows.size() == 2);
  CHECK(result.rows[0].scheme == "bd");
  CHECK(result.rows[1].scheme == "proposed");
  REQUIRE(result.aggregate.size() == 2);
  CHECK(result.aggregate[0].trials == 1);
  CHECK(result.aggregate[0].mean_sum_rate_nats ==
        doctest::Approx(result.rows[0].sum_rate_nats).epsilon(1e-12));
  CHECK(result.aggregate[1].mean_sum_rate_nats ==
        doctest::Approx(result.rows[1].sum_rate_nats).epsilon(1e-12));

  for (const ResultRow& row : result.rows) {
    CHECK(row.status == "ok");
    CHECK(row.sum_rate_nats >= 0.0);
    CHECK(row.sum_rate_bits ==
          doctest::Approx(row.sum_rate_nats / kLn2).epsilon(1e-12));
    if (row.scheme == "bd") {
      CHECK(row.rho == 1.0);
    } else {
      CHECK(row.rho > 0.0);
      CHECK(row.rho <= 1.0 + 1e-9);
    }
    CHECK(row.wall_ms == 0); // timing disabled by default
  }
}

TEST_CASE("aggregates equal the arithmetic row means") {
  ExperimentSpec spec = parse_config_text(
      R"({"snr_list_db": [5], "trials": 4, "base_seed": 11})");
  const SweepResult result = run_sweep(spec);
  for (const AggregateRow& agg : result.aggregate) {
    double acc = 0.0;
    int count = 0;
    for (const ResultRow& row : result.rows) {
      if (row.scheme != agg.scheme) continue;
      acc += row.sum_rate_nats;
      ++count;
    }
    REQUIRE(count == agg.trials);
    CHECK(agg.mean_sum_rate_nats == doctest::Approx(acc / count).epsilon(1e-12));
  }
}

TEST_CASE("proposed mean beats the zero-interference mean on a small sweep") {
  ExperimentSpec spec = parse_config_text(
      R"({"snr_list_db": [0, 10], "trials": 8, "base_seed": 21})");
  const SweepResult result = run_sweep(spec);
  for (std::size_t i = 0; i + 1 < result.aggregate.size(); i += 2) {
    const AggregateRow& bd = result.aggregate[i];
    const AggregateRow& proposed = result.aggregate[i + 1];
    REQUIRE(bd.scheme == "bd");
    REQUIRE(proposed.scheme == "proposed");
    CHECK(proposed.mean_sum_rate_nats >= bd.mean_sum_rate_nats);
    CHECK(proposed.mean_snr_boost_db >= 0.0);
  }
}

TEST_CASE("sweep output does not depend on the worker count") {
  ExperimentSpec spec = parse_config_text(
      R"({"snr_list_db": [0, 10], "trials": 3, "base_seed": 33})");
  TempFile serial("serial.csv"), parallel("parallel.csv");

  const SweepResult a = run_sweep(spec);
  write_results_csv(serial.path, a.rows);
  spec.jobs = 3;
  const SweepResult b = run_sweep(spec);
  write_results_csv(parallel.path, b.rows);
  CHECK(slurp(serial.path) == slurp(parallel.path));
}

TEST_CASE("identical specs give byte-identical outputs") {
  ExperimentSpec spec = parse_config_text(
      R"({"snr_list_db": [10], "trials": 2, "base_seed": 77})");
  TempFile first("a.csv"), second("b.csv"), agg1("a_agg.csv"), agg2("b_agg.csv");
  const SweepResult a = run_sweep(spec);
  write_results_csv(first.path, a.rows);
  write_aggregate_csv(agg1.path, a.aggregate);
  const SweepResult b = run_sweep(spec);
  write_results_csv(second.path, b.rows);
  write_aggregate_csv(agg2.path, b.aggregate);
  CHECK(slurp(first.path) == slurp(second.path));
  CHECK(slurp(agg1.path) == slurp(agg2.path));
}

TEST_CASE("convergence trace is gap-free and reproducible") {
  ExperimentSpec spec = parse_config_text("{}");
  spec.trace_snr_db = 10.0;
  spec.trace_seed = 3;
  const TraceResult trace = run_convergence_trace(spec);
  REQUIRE(!trace.iterates.empty());
  for (std::size_t i = 0; i < trace.iterates.size(); ++i) {
    CHECK(trace.iterates[i].iteration == static_cast<int>(i));
  }

  double final_scaled = 0.0;
  for (const EnhanceIterate& e : trace.iterates) {
    if (e.kind == CutKind::kObjective) final_scaled = e.scaled_sum_rate;
  }
  CHECK(final_scaled >= trace.bd_sum_rate_nats);

  TempFile t1("t1.csv"), t2("t2.csv");
  write_trace_csv(t1.path, trace);
  const TraceResult again = run_convergence_trace(spec);
  write_trace_csv(t2.path, again);
  CHECK(slurp(t1.path) == slurp(t2.path));
}
