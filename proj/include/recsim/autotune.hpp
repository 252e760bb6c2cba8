#ifndef RECSIM_AUTOTUNE_HPP
#define RECSIM_AUTOTUNE_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "recsim/sim.hpp"

namespace recsim {

struct InfeasibleSLA : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SearchStep {
  std::string knob;   // "batch_size" or "offload_threshold"
  std::int64_t value;
  double qps;
};

struct TunedConfig {
  std::int64_t batch_size = 1;
  std::optional<std::int64_t> offload_threshold;
  double qps = 0;
  double qps_per_watt = 0;
  double p95 = 0;
  double accel_work_fraction = 0;
  std::vector<SearchStep> search_path;
};

struct TuneParams {
  TraceGenParams gen;
  int seeds_to_average = 3;
  double degradation_tol = 0.01;  // stop when QPS drops >1% below the best
  double plateau_tol = 0.005;     // near-ties resolve to the smaller batch
};

// Two-phase hill climb: batch size over the power-of-two ladder first
// (CPU-only), then the offload threshold when an accelerator is
// configured, with a linear refinement pass around the coarse optimum.
TunedConfig tune(const ModelSpec& model, const CpuPlatformSpec& cpu,
                 const std::optional<AcceleratorSpec>& accel, double sla,
                 const TuneParams& params);

struct SweepRow {
  std::int64_t batch_size;
  std::optional<std::int64_t> threshold;
  double sla;
  double qps;
  double p95;
  double qps_per_watt;
  double accel_work_fraction;
};

struct SweepTable {
  std::vector<SweepRow> rows;
};

SweepTable sweep(const ModelSpec& model, const CpuPlatformSpec& cpu,
                 const std::optional<AcceleratorSpec>& accel,
                 const std::vector<double>& slas,
                 const std::vector<std::int64_t>& batch_grid,
                 const std::vector<std::optional<std::int64_t>>& threshold_grid,
                 const TraceGenParams& gen);

// Non-dominated rows under (maximize qps, minimize p95), p95 ascending.
std::vector<SweepRow> pareto(const SweepTable& table);

// Per-model p95 targets ("medium"); low/high are 0.5x/1.5x.
double sla_target(const std::string& model_name, const std::string& level);

}  // namespace recsim

#endif  // RECSIM_AUTOTUNE_HPP
