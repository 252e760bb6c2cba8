#ifndef RECSIM_REPORT_HPP
#define RECSIM_REPORT_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "recsim/autotune.hpp"

namespace recsim {

struct ReportRow {
  std::string model;
  std::string sla;        // low / medium / high
  std::string scheduler;  // static / tuned-cpu / tuned-accel
  double qps = 0;
  double qps_norm = 0;  // vs the static baseline at the low target
  double p95 = 0;
  double watts = 0;
  double qps_per_watt = 0;
  std::int64_t batch = 0;
  std::optional<std::int64_t> threshold;
  double accel_work_fraction = 0;
};

struct TrendCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ReproOptions {
  std::vector<std::string> models;  // empty = whole zoo
  std::string cpu = "skylake";
  std::string accel = "default";
  bool with_accel = true;
  std::uint64_t base_seed = 42;
  std::int64_t trace_n = 6000;
  int seeds_to_average = 2;
  std::string out_dir = ".";
};

struct ReproResult {
  std::vector<ReportRow> rows;
  std::vector<TrendCheck> checks;
  SweepTable pareto_table;
  std::vector<SweepRow> pareto_rows;

  bool all_pass() const;
};

// Desk-scale reproduction suite: static baseline vs tuned schedulers for
// every requested model and latency target, trend checks over the
// results, and a small Pareto sweep. Writes report.csv and pareto.csv
// into out_dir.
ReproResult run_repro(const ReproOptions& opts);

void write_report_csv(const std::vector<ReportRow>& rows, const std::string& path);
void write_pareto_csv(const SweepTable& table, const std::vector<SweepRow>& front,
                      const std::string& path);
std::string report_csv_text(const std::vector<ReportRow>& rows);
std::string pareto_csv_text(const SweepTable& table, const std::vector<SweepRow>& front);

}  // namespace recsim

#endif  // RECSIM_REPORT_HPP
