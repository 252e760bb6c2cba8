#ifndef RECSIM_PLATFORM_HPP
#define RECSIM_PLATFORM_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "recsim/model_zoo.hpp"

namespace recsim {

struct CpuPlatformSpec {
  std::string name;
  std::int64_t cores = 1;
  double flops_per_core_peak = 0;   // flops/s at full SIMD efficiency
  double simd_eff_floor = 1.0;      // e(1) lower bound, in (0, 1]
  std::int64_t simd_saturation_batch = 1;
  double mem_bandwidth_total = 0;   // bytes/s
  double contention_coeff = 0;      // slowdown at all-cores-active
  double gather_eff_floor = 1.0;    // embedding-gather efficiency for short streams
  // Gather efficiency is indexed by the per-table lookup-stream length of a
  // chunk (batch x lookups_per_table): long streams let the runtime sort and
  // coalesce accesses, short ones are independent pointer chases.
  double gather_onset_lookups = 0;      // batched-gather path engages past here
  double gather_saturation_lookups = 1;
  double gather_ramp_exponent = 1.0;    // concavity of the ramp, in (0, 1]
  std::int64_t spill_onset_batch = 1;  // working set fits cache up to here
  double spill_coeff = 0;           // compute slowdown per onset past it
  double request_overhead = 0;      // seconds of dispatch cost per request
  double tdp = 0;                   // watts

  // SIMD efficiency at a given per-request batch.
  double simd_eff(std::int64_t batch) const;
  // Bandwidth contention factor for `active` busy cores.
  double contention(std::int64_t active) const;
  // Random-gather bandwidth efficiency for a per-table lookup stream of
  // the given length; applies to embedding lookups only, streaming
  // traffic is unaffected.
  double gather_eff(double lookups) const;
  // Compute slowdown once the per-request working set spills the cache.
  double spill_derate(std::int64_t batch) const;
  void validate() const;
  bool operator==(const CpuPlatformSpec&) const = default;
};

struct AcceleratorSpec {
  std::string name;
  double flops_peak = 0;        // flops/s
  double mem_bandwidth = 0;     // bytes/s, achieved gather bandwidth
  double transfer_fixed = 0;    // seconds per offloaded query
  double transfer_per_byte = 0; // seconds/byte over the host link
  double power = 0;             // watts

  void validate() const;
  bool operator==(const AcceleratorSpec&) const = default;
};

struct ServiceTime {
  double total = 0;
  std::array<double, kNumOpCategories> per_category{};
  double transfer = 0;  // accelerator only

  double operator[](OpCategory c) const {
    return per_category[static_cast<int>(c)];
  }
};

// Roofline service time for one request of `batch` items on one core,
// with `active_cores` cores busy system-wide.
ServiceTime cpu_service_time(const ModelSpec& model, std::int64_t batch,
                             std::int64_t active_cores,
                             const CpuPlatformSpec& platform);

// Same, computed from a precomputed breakdown (hot path for the simulator).
ServiceTime cpu_service_time(const WorkBreakdown& wb, std::int64_t batch,
                             std::int64_t active_cores,
                             const CpuPlatformSpec& platform);

// Whole-query accelerator service time: host transfer plus roofline
// compute, no overlap.
ServiceTime accel_service_time(const ModelSpec& model, std::int64_t query_size,
                               const AcceleratorSpec& spec);

// Bytes shipped to the accelerator per query: dense features plus
// 8-byte lookup indices; embeddings are device-resident.
double accel_input_bytes(const ModelSpec& model, std::int64_t query_size);

// Smallest batch in [1, 1024] where the accelerator beats one CPU core,
// or nullopt if it never does.
std::optional<std::int64_t> crossover_batch(const ModelSpec& model,
                                            const CpuPlatformSpec& cpu,
                                            const AcceleratorSpec& accel);

double power_watts(const CpuPlatformSpec& cpu,
                   const std::optional<AcceleratorSpec>& accel);

CpuPlatformSpec builtin_cpu(const std::string& name);
AcceleratorSpec builtin_accel(const std::string& name);
std::vector<std::string> cpu_platform_names();
std::vector<std::string> accel_names();

}  // namespace recsim

#endif  // RECSIM_PLATFORM_HPP
