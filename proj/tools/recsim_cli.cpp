// recsim: discrete-event simulator and autotuner for recommendation
// inference serving.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "recsim/config.hpp"
#include "recsim/report.hpp"

using nlohmann::json;
using namespace recsim;

namespace {

std::uint64_t env_seed(std::uint64_t fallback) {
  if (const char* s = std::getenv("RECSIM_SEED")) {
    char* end = nullptr;
    std::uint64_t v = std::strtoull(s, &end, 10);
    if (end && *end == '\0') return v;
    throw std::invalid_argument("RECSIM_SEED is not an integer");
  }
  return fallback;
}

SizeDistribution make_dist(const std::string& kind, double p0, double p1,
                           double p2, double p3, std::int64_t max_size) {
  SizeDistribution d;
  if (kind == "fixed") d = SizeDistribution::fixed(static_cast<std::int64_t>(p0));
  else if (kind == "normal") d = SizeDistribution::normal(p0, p1);
  else if (kind == "lognormal") d = SizeDistribution::log_normal(p0, p1);
  else if (kind == "production") {
    d = SizeDistribution::production_heavy_tail();
    if (p0 > 0) d.p0 = p0;
    if (p1 > 0) d.p1 = p1;
    if (p2 > 0) d.p2 = p2;
    if (p3 > 0) d.p3 = p3;
  } else {
    throw std::invalid_argument("unknown distribution: " + kind);
  }
  d.max_size = max_size;
  d.validate();
  return d;
}

double parse_sla(const std::string& sla, const std::string& model_name) {
  if (sla == "low" || sla == "medium" || sla == "high")
    return sla_target(model_name, sla);
  return std::stod(sla);
}

json summary_json(const SimResult& r) {
  LatencySummary s = summarize(r);
  return {{"completed", r.completed},
          {"dropped", r.dropped},
          {"p50_s", s.p50},
          {"p95_s", s.p95},
          {"p99_s", s.p99},
          {"mean_s", s.mean},
          {"max_s", s.max},
          {"achieved_qps", r.achieved_qps},
          {"core_utilization", r.core_utilization},
          {"accel_utilization", r.accel_utilization},
          {"accel_work_fraction", r.accel_work_fraction}};
}

void write_latency_csv(const SimResult& r, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "arrival,size,latency_s,device\n";
  char buf[96];
  for (const auto& o : r.outcomes) {
    std::snprintf(buf, sizeof buf, "%.9g,%lld,%.9g,%s\n", o.arrival,
                  static_cast<long long>(o.size), o.latency,
                  o.on_accel ? "accel" : "cpu");
    f << buf;
  }
}

json tuned_json(const TunedConfig& t) {
  json path = json::array();
  for (const auto& s : t.search_path)
    path.push_back({{"knob", s.knob}, {"value", s.value}, {"qps", s.qps}});
  json j = {{"batch_size", t.batch_size},
            {"qps", t.qps},
            {"qps_per_watt", t.qps_per_watt},
            {"p95_s", t.p95},
            {"accel_work_fraction", t.accel_work_fraction},
            {"search_path", path}};
  if (t.offload_threshold) j["offload_threshold"] = *t.offload_threshold;
  return j;
}

std::string sweep_csv(const SweepTable& t) {
  std::ostringstream out;
  out << "batch,threshold,sla,qps,p95_s,qps_per_watt,accel_work_fraction\n";
  char buf[160];
  for (const auto& r : t.rows) {
    std::snprintf(buf, sizeof buf, "%lld,%s,%.6g,%.6g,%.6g,%.6g,%.6g\n",
                  static_cast<long long>(r.batch_size),
                  r.threshold ? std::to_string(*r.threshold).c_str() : "",
                  r.sla, r.qps, r.p95, r.qps_per_watt, r.accel_work_fraction);
    out << buf;
  }
  return out.str();
}

SweepTable read_sweep_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  SweepTable t;
  std::string line;
  std::getline(f, line);  // header
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    SweepRow r{};
    char thr[32] = "";
    long long batch = 0;
    int n = std::sscanf(line.c_str(), "%lld,%31[^,],%lg,%lg,%lg,%lg,%lg", &batch,
                        thr, &r.sla, &r.qps, &r.p95, &r.qps_per_watt,
                        &r.accel_work_fraction);
    if (n < 7) {
      // empty threshold field
      n = std::sscanf(line.c_str(), "%lld,,%lg,%lg,%lg,%lg,%lg", &batch, &r.sla,
                      &r.qps, &r.p95, &r.qps_per_watt, &r.accel_work_fraction);
      if (n < 6) throw std::runtime_error("bad sweep row: " + line);
    } else {
      r.threshold = std::stoll(thr);
    }
    r.batch_size = batch;
    t.rows.push_back(r);
  }
  return t;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"recsim: inference-serving simulator and scheduler autotuner"};
  app.require_subcommand(1);

  // ---- zoo ----
  auto* zoo = app.add_subcommand("zoo", "list built-in models and platforms");
  auto* zoo_list = zoo->add_subcommand("list", "list model archetypes");
  auto* zoo_platforms = zoo->add_subcommand("platforms", "list platforms");
  auto* zoo_show = zoo->add_subcommand("show", "dump one model as JSON");
  std::string zoo_model;
  zoo_show->add_option("--model", zoo_model, "model name")->required();

  // ---- trace ----
  auto* trace = app.add_subcommand("trace", "generate and inspect query traces");
  auto* tgen = trace->add_subcommand("gen", "generate a trace");
  auto* tstats = trace->add_subcommand("stats", "summary statistics of a trace");
  auto* tvalidate = trace->add_subcommand("validate", "check a trace file");
  std::uint64_t t_seed = 42;
  double t_lambda = 1000;
  std::int64_t t_n = 10000;
  std::string t_dist = "production";
  double t_p0 = 0, t_p1 = 0, t_p2 = 0, t_p3 = 0;
  std::int64_t t_max = 1000;
  std::string t_out = "trace.tsv", t_in;
  tgen->add_option("--seed", t_seed);
  tgen->add_option("--lambda", t_lambda);
  tgen->add_option("--n", t_n);
  tgen->add_option("--dist", t_dist, "fixed|normal|lognormal|production");
  tgen->add_option("--p0", t_p0, "size / mu / body_mu");
  tgen->add_option("--p1", t_p1, "sigma / body_sigma");
  tgen->add_option("--p2", t_p2, "tail_alpha");
  tgen->add_option("--p3", t_p3, "tail_weight");
  tgen->add_option("--max-size", t_max);
  tgen->add_option("--out", t_out);
  tstats->add_option("--in", t_in)->required();
  tvalidate->add_option("--in", t_in)->required();

  // ---- shared experiment flags ----
  std::string x_model = "DLRM-RMC1", x_cpu = "skylake", x_accel, x_sla = "medium";
  std::int64_t x_batch = 25, x_threshold = -1, x_n = 10000;
  std::uint64_t x_seed = 42;
  double x_lambda = -1;
  int x_seeds = 3;
  std::string x_dist = "production";
  std::string x_csv, x_events;

  auto add_experiment_flags = [&](CLI::App* c, bool with_knobs) {
    c->add_option("--model", x_model);
    c->add_option("--cpu", x_cpu, "broadwell|skylake");
    c->add_option("--accel", x_accel, "accelerator name (default)");
    c->add_option("--sla", x_sla, "low|medium|high or seconds");
    c->add_option("--n", x_n, "queries per trace");
    c->add_option("--seed", x_seed, "base seed (RECSIM_SEED overrides)");
    c->add_option("--dist", x_dist, "fixed|normal|lognormal|production");
    if (with_knobs) {
      c->add_option("--batch", x_batch);
      c->add_option("--threshold", x_threshold, "offload threshold (-1 = none)");
    }
  };

  auto* simulate_cmd = app.add_subcommand("simulate", "one configuration under load");
  add_experiment_flags(simulate_cmd, true);
  simulate_cmd->add_option("--lambda", x_lambda,
                           "offered load; omit to search for max QPS under the SLA");
  simulate_cmd->add_option("--csv", x_csv, "per-query latency CSV path");
  simulate_cmd->add_option("--events", x_events, "event-log debug dump path");

  auto* tune_cmd = app.add_subcommand("tune", "two-phase hill climb");
  add_experiment_flags(tune_cmd, false);
  tune_cmd->add_option("--seeds", x_seeds, "seeds averaged per evaluation");

  auto* sweep_cmd = app.add_subcommand("sweep", "grid sweep over batch and threshold");
  add_experiment_flags(sweep_cmd, false);
  std::vector<std::int64_t> s_batches = {16, 64, 256, 1024};
  std::vector<std::int64_t> s_thresholds = {-1};
  std::string s_out = "sweep.csv";
  sweep_cmd->add_option("--batches", s_batches)->delimiter(',');
  sweep_cmd->add_option("--thresholds", s_thresholds, "-1 = no offload")->delimiter(',');
  sweep_cmd->add_option("--out", s_out);

  auto* pareto_cmd = app.add_subcommand("pareto", "mark pareto-optimal sweep rows");
  std::string p_in = "sweep.csv", p_out = "pareto.csv";
  pareto_cmd->add_option("--in", p_in);
  pareto_cmd->add_option("--out", p_out);

  auto* report_cmd = app.add_subcommand("report", "static vs tuned report CSVs");
  std::vector<std::string> r_models;
  std::string r_out_dir = ".";
  std::int64_t r_n = 6000;
  int r_seeds = 2;
  bool r_no_accel = false;
  report_cmd->add_option("--models", r_models)->delimiter(',');
  report_cmd->add_option("--cpu", x_cpu);
  report_cmd->add_option("--out-dir", r_out_dir);
  report_cmd->add_option("--n", r_n);
  report_cmd->add_option("--seeds", r_seeds);
  report_cmd->add_flag("--no-accel", r_no_accel);

  auto* repro_cmd = app.add_subcommand(
      "repro", "desk-scale reproduction suite with trend checks");
  repro_cmd->add_option("--models", r_models)->delimiter(',');
  repro_cmd->add_option("--cpu", x_cpu);
  repro_cmd->add_option("--out-dir", r_out_dir);
  repro_cmd->add_option("--n", r_n);
  repro_cmd->add_option("--seeds", r_seeds);
  repro_cmd->add_flag("--no-accel", r_no_accel);

  CLI11_PARSE(app, argc, argv);

  try {
    if (zoo_list->parsed()) {
      for (const auto& n : zoo_names()) std::cout << n << "\n";
      return 0;
    }
    if (zoo_platforms->parsed()) {
      for (const auto& n : cpu_platform_names()) std::cout << "cpu: " << n << "\n";
      for (const auto& n : accel_names()) std::cout << "accel: " << n << "\n";
      return 0;
    }
    if (zoo_show->parsed()) {
      ExperimentConfig c;
      c.model = builtin_model(zoo_model);
      std::cout << emit_config(c);
      return 0;
    }

    if (tgen->parsed()) {
      auto dist = make_dist(t_dist, t_p0, t_p1, t_p2, t_p3, t_max);
      auto tr = gen_trace(env_seed(t_seed), t_lambda, dist, t_n);
      export_trace_file(tr, t_out);
      std::cout << "wrote " << t_out << " (" << tr.records.size() << " records)\n";
      return 0;
    }
    if (tstats->parsed() || tvalidate->parsed()) {
      QueryTrace tr = import_trace_file(t_in);
      if (tvalidate->parsed()) {
        std::cout << "ok: " << tr.records.size() << " records\n";
        return 0;
      }
      TraceStats st = trace_stats(tr);
      json j = {{"n", tr.records.size()},
                {"mean_size", st.mean_size},
                {"p50_size", st.p50_size},
                {"p95_size", st.p95_size},
                {"p99_size", st.p99_size},
                {"max_size", st.max_size},
                {"mean_gap_s", st.mean_gap},
                {"top_quartile_work_share", st.top_quartile_work_share}};
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (simulate_cmd->parsed() || tune_cmd->parsed() || sweep_cmd->parsed()) {
      ModelSpec model = builtin_model(x_model);
      CpuPlatformSpec cpu = builtin_cpu(x_cpu);
      std::optional<AcceleratorSpec> accel;
      if (!x_accel.empty()) accel = builtin_accel(x_accel);
      double sla = parse_sla(x_sla, x_model);
      TraceGenParams gen;
      gen.base_seed = env_seed(x_seed);
      gen.dist = make_dist(x_dist, 0, 0, 0, 0, 1000);
      gen.n = x_n;

      if (simulate_cmd->parsed()) {
        SchedulerConfig cfg;
        cfg.model = model;
        cfg.cpu = cpu;
        cfg.accel = accel;
        cfg.batch_size = x_batch;
        cfg.sla_p95 = sla;
        if (x_threshold >= 0) cfg.offload_threshold = x_threshold;
        json j;
        if (x_lambda > 0) {
          QueryTrace tr = gen_trace(gen.base_seed, x_lambda, gen.dist, gen.n);
          std::ofstream ev;
          EventLogger logger;
          if (!x_events.empty()) {
            ev.open(x_events);
            logger = [&ev](const SimEvent& e) {
              const char* k[] = {"arrival", "dispatch", "cpu_done", "accel_start",
                                 "accel_done"};
              char buf[128];
              std::snprintf(buf, sizeof buf, "%.9f %s q=%lld items=%lld busy=%lld\n",
                            e.time, k[static_cast<int>(e.kind)],
                            static_cast<long long>(e.query),
                            static_cast<long long>(e.items),
                            static_cast<long long>(e.busy_cores_after));
              ev << buf;
            };
          }
          SimResult r = simulate(tr, cfg, logger);
          j = summary_json(r);
          j["lambda"] = x_lambda;
          j["sla_s"] = sla;
          j["sla_met"] = summarize(r).p95 <= sla;
          if (!x_csv.empty()) write_latency_csv(r, x_csv);
        } else {
          QpsResult r = max_qps_under_sla(cfg, sla, gen);
          if (r.qps == 0) {
            std::cerr << "infeasible SLA\n";
            return 2;
          }
          j = {{"qps", r.qps}, {"at_lambda", r.at_lambda}, {"p95_s", r.p95},
               {"sla_s", sla}, {"accel_work_fraction", r.accel_work_fraction}};
        }
        std::cout << j.dump(2) << "\n";
        return 0;
      }

      if (tune_cmd->parsed()) {
        TuneParams tp;
        tp.gen = gen;
        tp.seeds_to_average = x_seeds;
        TunedConfig t = tune(model, cpu, accel, sla, tp);
        std::cout << tuned_json(t).dump(2) << "\n";
        return 0;
      }

      // sweep
      std::vector<std::optional<std::int64_t>> thresholds;
      for (auto t : s_thresholds)
        thresholds.push_back(t < 0 ? std::nullopt : std::optional<std::int64_t>(t));
      SweepTable table = sweep(model, cpu, accel, {sla}, s_batches, thresholds, gen);
      std::ofstream f(s_out);
      if (!f) throw std::runtime_error("cannot write " + s_out);
      f << sweep_csv(table);
      std::cout << "wrote " << s_out << " (" << table.rows.size() << " rows)\n";
      return 0;
    }

    if (pareto_cmd->parsed()) {
      SweepTable table = read_sweep_csv(p_in);
      auto front = pareto(table);
      write_pareto_csv(table, front, p_out);
      std::cout << "wrote " << p_out << " (" << front.size() << " of "
                << table.rows.size() << " rows on the frontier)\n";
      return 0;
    }

    if (report_cmd->parsed() || repro_cmd->parsed()) {
      ReproOptions opts;
      opts.models = r_models;
      opts.cpu = x_cpu;
      opts.with_accel = !r_no_accel;
      opts.trace_n = r_n;
      opts.seeds_to_average = r_seeds;
      opts.base_seed = env_seed(42);
      opts.out_dir = r_out_dir;
      ReproResult res = run_repro(opts);
      if (repro_cmd->parsed()) {
        for (const auto& c : res.checks)
          std::printf("[%s] %s: %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                      c.detail.c_str());
        std::printf("%s\n", res.all_pass() ? "all checks passed" : "some checks FAILED");
        if (!res.all_pass()) return 1;
      } else {
        std::cout << "wrote " << opts.out_dir << "/report.csv\n";
      }
      return 0;
    }
  } catch (const InfeasibleSLA& e) {
    std::cerr << "infeasible SLA: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
