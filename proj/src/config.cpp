#include "recsim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace recsim {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw std::invalid_argument("unknown key '" + it.key() + "' in " + where);
}

json stack_to_json(const LayerStack& s) { return json(s.dims); }

LayerStack stack_from_json(const json& j) {
  LayerStack s;
  s.dims = j.get<std::vector<std::int64_t>>();
  return s;
}

json model_to_json(const ModelSpec& m) {
  json j;
  j["name"] = m.name;
  if (m.dense_fc) j["dense_fc"] = stack_to_json(*m.dense_fc);
  j["predict_fc"] = stack_to_json(m.predict_fc);
  j["num_parallel_predict_stacks"] = m.num_parallel_predict_stacks;
  j["embeddings"] = {{"num_tables", m.embeddings.num_tables},
                     {"lookups_per_table", m.embeddings.lookups_per_table},
                     {"embedding_dim", m.embeddings.embedding_dim},
                     {"pooling", to_string(m.embeddings.pooling)}};
  j["dense_input_dim"] = m.dense_input_dim;
  if (m.recurrent_hidden_dim) j["recurrent_hidden_dim"] = *m.recurrent_hidden_dim;
  return j;
}

ModelSpec model_from_json(const json& j) {
  reject_unknown(j,
                 {"name", "dense_fc", "predict_fc", "num_parallel_predict_stacks",
                  "embeddings", "dense_input_dim", "recurrent_hidden_dim"},
                 "model");
  ModelSpec m;
  m.name = j.at("name").get<std::string>();
  if (j.contains("dense_fc")) m.dense_fc = stack_from_json(j.at("dense_fc"));
  m.predict_fc = stack_from_json(j.at("predict_fc"));
  m.num_parallel_predict_stacks = j.value("num_parallel_predict_stacks", 1);
  const json& e = j.at("embeddings");
  reject_unknown(e, {"num_tables", "lookups_per_table", "embedding_dim", "pooling"},
                 "embeddings");
  m.embeddings.num_tables = e.at("num_tables").get<std::int64_t>();
  m.embeddings.lookups_per_table = e.at("lookups_per_table").get<std::int64_t>();
  m.embeddings.embedding_dim = e.at("embedding_dim").get<std::int64_t>();
  m.embeddings.pooling = pooling_from_string(e.at("pooling").get<std::string>());
  m.dense_input_dim = j.value("dense_input_dim", 0);
  if (j.contains("recurrent_hidden_dim"))
    m.recurrent_hidden_dim = j.at("recurrent_hidden_dim").get<std::int64_t>();
  m.validate();
  return m;
}

json cpu_to_json(const CpuPlatformSpec& p) {
  return {{"name", p.name},
          {"cores", p.cores},
          {"flops_per_core_peak", p.flops_per_core_peak},
          {"simd_eff_floor", p.simd_eff_floor},
          {"simd_saturation_batch", p.simd_saturation_batch},
          {"mem_bandwidth_total", p.mem_bandwidth_total},
          {"contention_coeff", p.contention_coeff},
          {"gather_eff_floor", p.gather_eff_floor},
          {"gather_onset_lookups", p.gather_onset_lookups},
          {"gather_saturation_lookups", p.gather_saturation_lookups},
          {"gather_ramp_exponent", p.gather_ramp_exponent},
          {"spill_onset_batch", p.spill_onset_batch},
          {"spill_coeff", p.spill_coeff},
          {"request_overhead", p.request_overhead},
          {"tdp", p.tdp}};
}

CpuPlatformSpec cpu_from_json(const json& j) {
  reject_unknown(j,
                 {"name", "cores", "flops_per_core_peak", "simd_eff_floor",
                  "simd_saturation_batch", "mem_bandwidth_total",
                  "contention_coeff", "gather_eff_floor",
                  "gather_onset_lookups", "gather_saturation_lookups",
                  "gather_ramp_exponent", "spill_onset_batch",
                  "spill_coeff", "request_overhead", "tdp"},
                 "cpu");
  CpuPlatformSpec p;
  p.name = j.at("name").get<std::string>();
  p.cores = j.at("cores").get<std::int64_t>();
  p.flops_per_core_peak = j.at("flops_per_core_peak").get<double>();
  p.simd_eff_floor = j.at("simd_eff_floor").get<double>();
  p.simd_saturation_batch = j.at("simd_saturation_batch").get<std::int64_t>();
  p.mem_bandwidth_total = j.at("mem_bandwidth_total").get<double>();
  p.contention_coeff = j.at("contention_coeff").get<double>();
  p.gather_eff_floor = j.at("gather_eff_floor").get<double>();
  p.gather_onset_lookups = j.value("gather_onset_lookups", 0.0);
  p.gather_saturation_lookups = j.at("gather_saturation_lookups").get<double>();
  p.gather_ramp_exponent = j.value("gather_ramp_exponent", 1.0);
  p.spill_onset_batch = j.at("spill_onset_batch").get<std::int64_t>();
  p.spill_coeff = j.at("spill_coeff").get<double>();
  p.request_overhead = j.at("request_overhead").get<double>();
  p.tdp = j.at("tdp").get<double>();
  p.validate();
  return p;
}

json accel_to_json(const AcceleratorSpec& a) {
  return {{"name", a.name},
          {"flops_peak", a.flops_peak},
          {"mem_bandwidth", a.mem_bandwidth},
          {"transfer_fixed", a.transfer_fixed},
          {"transfer_per_byte", a.transfer_per_byte},
          {"power", a.power}};
}

AcceleratorSpec accel_from_json(const json& j) {
  reject_unknown(j,
                 {"name", "flops_peak", "mem_bandwidth", "transfer_fixed",
                  "transfer_per_byte", "power"},
                 "accel");
  AcceleratorSpec a;
  a.name = j.at("name").get<std::string>();
  a.flops_peak = j.at("flops_peak").get<double>();
  a.mem_bandwidth = j.at("mem_bandwidth").get<double>();
  a.transfer_fixed = j.at("transfer_fixed").get<double>();
  a.transfer_per_byte = j.at("transfer_per_byte").get<double>();
  a.power = j.at("power").get<double>();
  a.validate();
  return a;
}

const char* dist_kind_name(SizeDistribution::Kind k) {
  switch (k) {
    case SizeDistribution::Kind::Fixed: return "Fixed";
    case SizeDistribution::Kind::Normal: return "Normal";
    case SizeDistribution::Kind::LogNormal: return "LogNormal";
    case SizeDistribution::Kind::ProductionHeavyTail: return "ProductionHeavyTail";
  }
  return "?";
}

json dist_to_json(const SizeDistribution& d) {
  json j;
  j["kind"] = dist_kind_name(d.kind);
  j["max_size"] = d.max_size;
  switch (d.kind) {
    case SizeDistribution::Kind::Fixed:
      j["size"] = d.p0;
      break;
    case SizeDistribution::Kind::Normal:
    case SizeDistribution::Kind::LogNormal:
      j["mu"] = d.p0;
      j["sigma"] = d.p1;
      break;
    case SizeDistribution::Kind::ProductionHeavyTail:
      j["body_mu"] = d.p0;
      j["body_sigma"] = d.p1;
      j["tail_alpha"] = d.p2;
      j["tail_weight"] = d.p3;
      break;
  }
  return j;
}

SizeDistribution dist_from_json(const json& j) {
  SizeDistribution d;
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "Fixed") {
    reject_unknown(j, {"kind", "max_size", "size"}, "distribution");
    d.kind = SizeDistribution::Kind::Fixed;
    d.p0 = j.at("size").get<double>();
  } else if (kind == "Normal" || kind == "LogNormal") {
    reject_unknown(j, {"kind", "max_size", "mu", "sigma"}, "distribution");
    d.kind = kind == "Normal" ? SizeDistribution::Kind::Normal
                              : SizeDistribution::Kind::LogNormal;
    d.p0 = j.at("mu").get<double>();
    d.p1 = j.at("sigma").get<double>();
  } else if (kind == "ProductionHeavyTail") {
    reject_unknown(j, {"kind", "max_size", "body_mu", "body_sigma", "tail_alpha",
                       "tail_weight"},
                   "distribution");
    d = SizeDistribution::production_heavy_tail();
    d.p0 = j.value("body_mu", d.p0);
    d.p1 = j.value("body_sigma", d.p1);
    d.p2 = j.value("tail_alpha", d.p2);
    d.p3 = j.value("tail_weight", d.p3);
  } else {
    throw std::invalid_argument("unknown distribution kind: " + kind);
  }
  d.max_size = j.value("max_size", std::int64_t{1000});
  d.validate();
  return d;
}

}  // namespace

ModelSpec ExperimentConfig::resolve_model() const {
  if (auto* s = std::get_if<std::string>(&model)) return builtin_model(*s);
  return std::get<ModelSpec>(model);
}

CpuPlatformSpec ExperimentConfig::resolve_cpu() const {
  if (auto* s = std::get_if<std::string>(&cpu)) return builtin_cpu(*s);
  return std::get<CpuPlatformSpec>(cpu);
}

std::optional<AcceleratorSpec> ExperimentConfig::resolve_accel() const {
  if (!accel) return std::nullopt;
  if (auto* s = std::get_if<std::string>(&*accel)) return builtin_accel(*s);
  return std::get<AcceleratorSpec>(*accel);
}

double ExperimentConfig::resolve_sla_seconds() const {
  if (auto* s = std::get_if<std::string>(&sla))
    return sla_target(resolve_model().name, *s);
  return std::get<double>(sla);
}

TraceGenParams ExperimentConfig::gen_params() const {
  TraceGenParams g;
  g.base_seed = base_seed;
  g.dist = distribution;
  g.n = trace_n;
  return g;
}

std::string emit_config(const ExperimentConfig& c) {
  json j;
  j["version"] = 1;
  if (auto* s = std::get_if<std::string>(&c.model)) j["model"] = *s;
  else j["model"] = model_to_json(std::get<ModelSpec>(c.model));
  if (auto* s = std::get_if<std::string>(&c.cpu)) j["cpu"] = *s;
  else j["cpu"] = cpu_to_json(std::get<CpuPlatformSpec>(c.cpu));
  if (c.accel) {
    if (auto* s = std::get_if<std::string>(&*c.accel)) j["accel"] = *s;
    else j["accel"] = accel_to_json(std::get<AcceleratorSpec>(*c.accel));
  }
  if (auto* s = std::get_if<std::string>(&c.sla)) j["sla"] = *s;
  else j["sla"] = std::get<double>(c.sla);
  j["distribution"] = dist_to_json(c.distribution);
  j["base_seed"] = c.base_seed;
  j["trace_n"] = c.trace_n;
  j["seeds_to_average"] = c.seeds_to_average;
  j["batch_grid"] = c.batch_grid;
  j["threshold_grid"] = c.threshold_grid;
  return j.dump(2) + "\n";
}

namespace {

ExperimentConfig parse_config_impl(const std::string& text) {
  json j = json::parse(text);
  reject_unknown(j,
                 {"version", "model", "cpu", "accel", "sla", "distribution",
                  "base_seed", "trace_n", "seeds_to_average", "batch_grid",
                  "threshold_grid"},
                 "config");
  if (!j.contains("version") || j.at("version").get<int>() != 1)
    throw std::invalid_argument("config must declare version: 1");
  ExperimentConfig c;
  if (j.contains("model")) {
    if (j.at("model").is_string()) c.model = j.at("model").get<std::string>();
    else c.model = model_from_json(j.at("model"));
  }
  if (j.contains("cpu")) {
    if (j.at("cpu").is_string()) c.cpu = j.at("cpu").get<std::string>();
    else c.cpu = cpu_from_json(j.at("cpu"));
  }
  if (j.contains("accel")) {
    if (j.at("accel").is_string())
      c.accel = j.at("accel").get<std::string>();
    else
      c.accel = accel_from_json(j.at("accel"));
  }
  if (j.contains("sla")) {
    if (j.at("sla").is_string()) c.sla = j.at("sla").get<std::string>();
    else c.sla = j.at("sla").get<double>();
  }
  if (j.contains("distribution")) c.distribution = dist_from_json(j.at("distribution"));
  c.base_seed = j.value("base_seed", std::uint64_t{42});
  c.trace_n = j.value("trace_n", std::int64_t{50000});
  c.seeds_to_average = j.value("seeds_to_average", 3);
  if (j.contains("batch_grid"))
    c.batch_grid = j.at("batch_grid").get<std::vector<std::int64_t>>();
  if (j.contains("threshold_grid"))
    c.threshold_grid = j.at("threshold_grid").get<std::vector<std::int64_t>>();
  if (c.trace_n < 1) throw std::invalid_argument("trace_n < 1");
  if (c.seeds_to_average < 1) throw std::invalid_argument("seeds_to_average < 1");
  for (auto b : c.batch_grid)
    if (b < 1) throw std::invalid_argument("batch_grid entry < 1");
  for (auto t : c.threshold_grid)
    if (t < -1 || t == 0)
      throw std::invalid_argument("threshold_grid entry must be -1 or >= 1");
  c.distribution.validate();
  // Resolve names eagerly so bad configs fail at parse time.
  c.resolve_model();
  c.resolve_cpu();
  c.resolve_accel();
  c.resolve_sla_seconds();
  return c;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  try {
    return parse_config_impl(text);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace recsim
