#include "recsim/platform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace recsim {

double CpuPlatformSpec::simd_eff(std::int64_t batch) const {
  double b = static_cast<double>(batch);
  double sat = static_cast<double>(simd_saturation_batch);
  return std::min(1.0, simd_eff_floor + (1.0 - simd_eff_floor) * b / sat);
}

double CpuPlatformSpec::contention(std::int64_t active) const {
  if (cores <= 1) return 1.0;
  double a = static_cast<double>(std::clamp<std::int64_t>(active, 1, cores));
  return 1.0 + contention_coeff * (a - 1.0) / (static_cast<double>(cores) - 1.0);
}

double CpuPlatformSpec::gather_eff(double lookups) const {
  // Below the onset every lookup is an independent pointer chase and the
  // efficiency sits at the floor; past it the runtime can sort and tile
  // the accesses. Coalescing gains are front-loaded (sorting a stream
  // pays off quickly, then returns diminish), hence the concave ramp.
  double over = lookups - gather_onset_lookups;
  if (over <= 0) return gather_eff_floor;
  double span = gather_saturation_lookups - gather_onset_lookups;
  double x = std::pow(std::min(1.0, over / span), gather_ramp_exponent);
  return gather_eff_floor + (1.0 - gather_eff_floor) * x;
}

double CpuPlatformSpec::spill_derate(std::int64_t batch) const {
  double over = static_cast<double>(batch - spill_onset_batch);
  if (over <= 0) return 1.0;
  // Miss ratio grows with the working-set overflow past the cache.
  double r = over / static_cast<double>(spill_onset_batch);
  return 1.0 + spill_coeff * r;
}

void CpuPlatformSpec::validate() const {
  if (cores < 1) throw std::invalid_argument("cores < 1");
  if (flops_per_core_peak <= 0) throw std::invalid_argument("flops_per_core_peak <= 0");
  if (simd_eff_floor <= 0 || simd_eff_floor > 1)
    throw std::invalid_argument("simd_eff_floor outside (0, 1]");
  if (simd_saturation_batch < 1) throw std::invalid_argument("simd_saturation_batch < 1");
  if (mem_bandwidth_total <= 0) throw std::invalid_argument("mem_bandwidth_total <= 0");
  if (contention_coeff < 0) throw std::invalid_argument("contention_coeff < 0");
  if (gather_eff_floor <= 0 || gather_eff_floor > 1)
    throw std::invalid_argument("gather_eff_floor outside (0, 1]");
  if (gather_onset_lookups < 0)
    throw std::invalid_argument("gather_onset_lookups < 0");
  if (gather_saturation_lookups < 1 ||
      gather_saturation_lookups <= gather_onset_lookups)
    throw std::invalid_argument(
        "gather_saturation_lookups must exceed gather_onset_lookups");
  if (gather_ramp_exponent <= 0 || gather_ramp_exponent > 1)
    throw std::invalid_argument("gather_ramp_exponent outside (0, 1]");
  if (spill_onset_batch < 1) throw std::invalid_argument("spill_onset_batch < 1");
  if (spill_coeff < 0) throw std::invalid_argument("spill_coeff < 0");
  if (request_overhead < 0) throw std::invalid_argument("request_overhead < 0");
  if (tdp <= 0) throw std::invalid_argument("tdp <= 0");
}

void AcceleratorSpec::validate() const {
  if (flops_peak <= 0 || mem_bandwidth <= 0 || transfer_fixed <= 0 ||
      transfer_per_byte <= 0 || power <= 0)
    throw std::invalid_argument("accelerator parameters must be positive");
}

ServiceTime cpu_service_time(const WorkBreakdown& wb, std::int64_t batch,
                             std::int64_t active_cores,
                             const CpuPlatformSpec& platform) {
  if (batch < 1) throw std::invalid_argument("batch < 1");
  if (active_cores < 1 || active_cores > platform.cores)
    throw std::invalid_argument("active_cores outside [1, cores]");
  const double eff_flops = platform.flops_per_core_peak * platform.simd_eff(batch);
  const double bw_share =
      platform.mem_bandwidth_total / static_cast<double>(active_cores);
  const double contention = platform.contention(active_cores);

  const double gather = platform.gather_eff(wb.gather_stream);
  const double derate = platform.spill_derate(batch);

  ServiceTime st;
  for (int c = 0; c < kNumOpCategories; ++c) {
    const auto& w = wb.per_category[c];
    double compute = w.flops * derate / eff_flops;
    double bw = bw_share;
    if (static_cast<OpCategory>(c) == OpCategory::EmbeddingLookup) bw *= gather;
    double memory = w.bytes * contention / bw;
    st.per_category[c] = std::max(compute, memory);
    st.total += st.per_category[c];
  }
  st.total += platform.request_overhead;
  return st;
}

ServiceTime cpu_service_time(const ModelSpec& model, std::int64_t batch,
                             std::int64_t active_cores,
                             const CpuPlatformSpec& platform) {
  return cpu_service_time(work(model, batch), batch, active_cores, platform);
}

double accel_input_bytes(const ModelSpec& model, std::int64_t query_size) {
  const auto& e = model.embeddings;
  double per_item = static_cast<double>(model.dense_input_dim) * 4.0 +
                    static_cast<double>(e.num_tables) *
                        static_cast<double>(e.lookups_per_table) * 8.0;
  return per_item * static_cast<double>(query_size);
}

ServiceTime accel_service_time(const ModelSpec& model, std::int64_t query_size,
                               const AcceleratorSpec& spec) {
  if (query_size < 1) throw std::invalid_argument("query_size < 1");
  WorkBreakdown wb = work(model, query_size);
  ServiceTime st;
  st.transfer = spec.transfer_fixed +
                spec.transfer_per_byte * accel_input_bytes(model, query_size);
  double compute = std::max(wb.total_flops() / spec.flops_peak,
                            wb.total_bytes() / spec.mem_bandwidth);
  // Apportion compute across categories by their own roofline weight so
  // the breakdown still sums to the total.
  double weight_sum = 0;
  std::array<double, kNumOpCategories> weights{};
  for (int c = 0; c < kNumOpCategories; ++c) {
    const auto& w = wb.per_category[c];
    weights[c] = std::max(w.flops / spec.flops_peak, w.bytes / spec.mem_bandwidth);
    weight_sum += weights[c];
  }
  if (weight_sum > 0)
    for (int c = 0; c < kNumOpCategories; ++c)
      st.per_category[c] = compute * weights[c] / weight_sum;
  st.total = st.transfer + compute;
  return st;
}

std::optional<std::int64_t> crossover_batch(const ModelSpec& model,
                                            const CpuPlatformSpec& cpu,
                                            const AcceleratorSpec& accel) {
  for (std::int64_t b = 1; b <= 1024; ++b) {
    if (accel_service_time(model, b, accel).total <
        cpu_service_time(model, b, 1, cpu).total)
      return b;
  }
  return std::nullopt;
}

double power_watts(const CpuPlatformSpec& cpu,
                   const std::optional<AcceleratorSpec>& accel) {
  return cpu.tdp + (accel ? accel->power : 0.0);
}

CpuPlatformSpec builtin_cpu(const std::string& name) {
  // flops_per_core_peak is sustained GEMM throughput under the all-core
  // vector-frequency license, not the datasheet peak. Broadwell keeps a
  // bigger inclusive L3 per core (late spill, gathers stay warm) but
  // pays more cross-core contention; Skylake clocks AVX-512 lower per
  // op but has more cores and bandwidth, saturates SIMD later, and
  // spills its smaller non-inclusive L3 earlier.
  if (name == "broadwell") {
    CpuPlatformSpec p{"broadwell", 28, 36e9, 0.6, 16,
                      76.8e9, 0.4, 0.01, 0, 40960, 1.0, 512, 0.1, 4e-5, 120.0};
    return p;
  }
  if (name == "skylake") {
    CpuPlatformSpec p{"skylake", 40, 42e9, 0.6, 64,
                      90e9, 0.1, 0.29, 5120, 81920, 0.25, 128, 0.053, 4e-5, 125.0};
    return p;
  }
  throw std::invalid_argument("unknown CPU platform: " + name);
}

AcceleratorSpec builtin_accel(const std::string& name) {
  if (name == "default") {
    // 1080Ti-class compute envelope; bandwidth is achieved gather
    // bandwidth rather than pin peak; transfer costs model launch
    // latency plus an effective ~14 GB/s host link.
    AcceleratorSpec a{"default", 11.3e12, 240e9, 1e-4, 1.1e-10, 250.0};
    return a;
  }
  throw std::invalid_argument("unknown accelerator: " + name);
}

std::vector<std::string> cpu_platform_names() { return {"broadwell", "skylake"}; }
std::vector<std::string> accel_names() { return {"default"}; }

}  // namespace recsim
