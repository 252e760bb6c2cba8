#include <doctest.h>

#include <sstream>

#include "recsim/config.hpp"
#include "recsim/report.hpp"

using namespace recsim;

TEST_CASE("config defaults resolve to built-ins") {
  ExperimentConfig cfg;
  CHECK(cfg.resolve_model().name == "DLRM-RMC1");
  CHECK(cfg.resolve_cpu().name == "skylake");
  CHECK_FALSE(cfg.resolve_accel().has_value());
  CHECK(cfg.resolve_sla_seconds() == doctest::Approx(0.100));
}

TEST_CASE("emit then parse is the identity") {
  ExperimentConfig cfg;
  cfg.model = std::string("DIEN");
  cfg.accel = std::string("default");
  cfg.sla = 0.0375;
  cfg.base_seed = 7;
  cfg.trace_n = 1234;
  cfg.seeds_to_average = 2;
  cfg.batch_grid = {2, 8, 32};
  cfg.threshold_grid = {-1, 64, 256};
  cfg.distribution = SizeDistribution::log_normal(3.0, 0.7);

  ExperimentConfig back = parse_config(emit_config(cfg));
  CHECK(back == cfg);

  // Inline specs survive the round trip too.
  ExperimentConfig inl;
  inl.model = builtin_model("NCF");
  inl.cpu = builtin_cpu("broadwell");
  inl.accel = builtin_accel("default");
  CHECK(parse_config(emit_config(inl)) == inl);
}

TEST_CASE("parser rejects malformed configs") {
  CHECK_THROWS_AS(parse_config("not json"), ConfigError);
  CHECK_THROWS_AS(parse_config("{}"), ConfigError);  // missing version
  CHECK_THROWS_AS(parse_config(R"({"version": 2})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"version": 1, "modle": "NCF"})"),
                  ConfigError);  // unknown key
  CHECK_THROWS_AS(
      parse_config(R"({"version": 1, "model": {"name": "x", "bogus": 3}})"),
      ConfigError);  // unknown key in a nested spec
  CHECK_THROWS_AS(parse_config(R"({"version": 1, "model": "NoSuchModel"})"),
                  ConfigError);  // eager name resolution
  CHECK_THROWS_AS(parse_config(R"({"version": 1, "sla": "impossible"})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"version": 1, "trace_n": 0})"), ConfigError);
}

TEST_CASE("minimal config picks up every default") {
  ExperimentConfig parsed = parse_config(R"({"version": 1, "model": "WND"})");
  ExperimentConfig expected;
  expected.model = std::string("WND");
  CHECK(parsed == expected);
}

TEST_CASE("report csv shape and normalization anchor") {
  std::vector<ReportRow> rows;
  rows.push_back({"NCF", "low", "static", 100, 1.0, 0.004, 125, 0.8, 25,
                  std::nullopt, 0});
  rows.push_back({"NCF", "medium", "tuned-accel", 250, 2.5, 0.0048, 375,
                  250.0 / 375, 64, 128, 0.4});
  std::string csv = report_csv_text(rows);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line ==
        "model,sla,scheduler,qps,qps_norm,p95_s,watts,qps_per_watt,batch,"
        "threshold,accel_work_fraction");
  std::getline(in, line);
  CHECK(line == "NCF,low,static,100,1,0.004,125,0.8,25,,0");
  std::getline(in, line);
  CHECK(line.substr(0, 26) == "NCF,medium,tuned-accel,250");
  // threshold column carries the value when present
  CHECK(line.find(",128,") != std::string::npos);
}

TEST_CASE("pareto csv marks exactly the frontier rows") {
  SweepTable t;
  t.rows.push_back({16, std::nullopt, 0.1, 100, 0.01, 1, 0});
  t.rows.push_back({64, std::nullopt, 0.1, 150, 0.02, 1.5, 0});
  t.rows.push_back({256, std::nullopt, 0.1, 140, 0.03, 1.4, 0});
  auto front = pareto(t);
  std::string csv = pareto_csv_text(t, front);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "p95_s,qps,batch,threshold,is_pareto");
  int marked = 0, total = 0;
  while (std::getline(in, line)) {
    ++total;
    if (line.size() >= 2 && line.substr(line.size() - 2) == ",1") ++marked;
  }
  CHECK(total == 3);
  CHECK(marked == 2);
}

TEST_CASE("desk-scale repro rows are deterministic and anchored") {
  // Tiny single-model run; the full suite is exercised by the
  // acceptance binary.
  ReproOptions opts;
  opts.models = {"NCF"};
  opts.with_accel = false;
  opts.trace_n = 1200;
  opts.seeds_to_average = 1;
  opts.out_dir = "";  // skip file output

  ReproResult a = run_repro(opts);
  ReproResult b = run_repro(opts);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].qps == b.rows[i].qps);
    CHECK(a.rows[i].batch == b.rows[i].batch);
  }

  // static/low is the normalization anchor: its qps_norm is exactly 1,
  // and every other row in the model is scaled by its qps.
  double anchor = 0;
  for (const auto& r : a.rows)
    if (r.scheduler == "static" && r.sla == "low") anchor = r.qps;
  REQUIRE(anchor > 0);
  for (const auto& r : a.rows) {
    CHECK(r.qps_norm == doctest::Approx(r.qps / anchor));
    CHECK(r.qps_per_watt == doctest::Approx(r.qps / r.watts));
    if (r.scheduler == "static") CHECK(r.batch == 25);
  }
}
