#ifndef RECSIM_SIM_HPP
#define RECSIM_SIM_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "recsim/loadgen.hpp"
#include "recsim/platform.hpp"

namespace recsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyResult : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SchedulerConfig {
  std::int64_t batch_size = 1;
  std::optional<std::int64_t> offload_threshold;  // absent = CPU-only
  ModelSpec model;
  CpuPlatformSpec cpu;
  std::optional<AcceleratorSpec> accel;
  double sla_p95 = 0.1;          // seconds
  double warmup_fraction = 0.1;  // leading queries excluded from metrics

  void validate() const;
};

// One completed query, for CSV export and debugging.
struct QueryOutcome {
  double arrival = 0;
  std::int64_t size = 0;
  double latency = 0;
  bool on_accel = false;
};

struct SimResult {
  std::vector<double> latencies;  // post-warmup, in completion order
  std::vector<QueryOutcome> outcomes;
  std::int64_t completed = 0;
  std::int64_t dropped = 0;  // always 0: SLA violations are observed, not shed
  double core_utilization = 0;
  double accel_utilization = 0;
  double accel_work_fraction = 0;  // items served on the accelerator
  double achieved_qps = 0;
};

struct LatencySummary {
  double p50 = 0, p95 = 0, p99 = 0, mean = 0, max = 0;
};

// Debug hook: called once per simulation event when installed.
struct SimEvent {
  double time;
  enum class Kind { Arrival, Dispatch, CpuDone, AccelStart, AccelDone } kind;
  std::int64_t query;
  std::int64_t items;
  std::int64_t busy_cores_after;
};
using EventLogger = std::function<void(const SimEvent&)>;

SimResult simulate(const QueryTrace& trace, const SchedulerConfig& cfg,
                   const EventLogger& logger = nullptr);

// Exact order-statistic percentiles: value at index ceil(p/100 * n) - 1
// of the ascending sort.
LatencySummary summarize(const SimResult& result);
double exact_percentile(std::vector<double> values, double p);

struct TraceGenParams {
  std::uint64_t base_seed = 42;
  SizeDistribution dist = SizeDistribution::production_heavy_tail();
  std::int64_t n = 50000;
};

struct QpsResult {
  double qps = 0;        // achieved QPS of the accepted run
  double at_lambda = 0;  // offered rate that met the SLA
  double p95 = 0;
  double accel_work_fraction = 0;
};

// Largest sustainable arrival rate whose p95 stays within `sla`, found
// by bisection over lambda to 1% relative precision. (0, 0) if even
// lambda = 1 misses the target.
QpsResult max_qps_under_sla(const SchedulerConfig& cfg, double sla,
                            const TraceGenParams& gen);

}  // namespace recsim

#endif  // RECSIM_SIM_HPP
