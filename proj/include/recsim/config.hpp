#ifndef RECSIM_CONFIG_HPP
#define RECSIM_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "recsim/autotune.hpp"
#include "recsim/loadgen.hpp"
#include "recsim/model_zoo.hpp"
#include "recsim/platform.hpp"

namespace recsim {

// Experiment description as stored in JSON config files. Names refer to
// the built-in zoo/platforms; inline specs are spelled out in full.
// Unknown keys are rejected.
struct ExperimentConfig {
  std::variant<std::string, ModelSpec> model = std::string("DLRM-RMC1");
  std::variant<std::string, CpuPlatformSpec> cpu = std::string("skylake");
  std::optional<std::variant<std::string, AcceleratorSpec>> accel;
  // "low" / "medium" / "high", or explicit seconds.
  std::variant<std::string, double> sla = std::string("medium");
  SizeDistribution distribution = SizeDistribution::production_heavy_tail();
  std::uint64_t base_seed = 42;
  std::int64_t trace_n = 50000;
  int seeds_to_average = 3;
  std::vector<std::int64_t> batch_grid = {1, 4, 16, 64, 256, 1024};
  // -1 entries mean "no offload".
  std::vector<std::int64_t> threshold_grid = {-1};

  bool operator==(const ExperimentConfig&) const = default;

  ModelSpec resolve_model() const;
  CpuPlatformSpec resolve_cpu() const;
  std::optional<AcceleratorSpec> resolve_accel() const;
  double resolve_sla_seconds() const;
  TraceGenParams gen_params() const;
};

std::string emit_config(const ExperimentConfig& cfg);
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

}  // namespace recsim

#endif  // RECSIM_CONFIG_HPP
