#include "recsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace recsim {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const std::vector<std::string> kLevels = {"low", "medium", "high"};

// Lowest p95 the system can reach when essentially unloaded, searching
// over the batch ladder (and full offload for the accelerated case).
double min_feasible_p95(const ModelSpec& model, const CpuPlatformSpec& cpu,
                        const std::optional<AcceleratorSpec>& accel,
                        const TraceGenParams& gen) {
  QueryTrace trace = gen_trace(gen.base_seed + 7777, 50.0, gen.dist,
                               std::min<std::int64_t>(gen.n, 2000));
  double best = std::numeric_limits<double>::infinity();
  for (std::int64_t b = 1; b <= 1024; b *= 2) {
    SchedulerConfig cfg;
    cfg.model = model;
    cfg.cpu = cpu;
    cfg.batch_size = b;
    if (accel) {
      cfg.accel = accel;
      cfg.offload_threshold = 1;  // everything above one item offloads
    }
    SimResult r = simulate(trace, cfg);
    best = std::min(best, summarize(r).p95);
  }
  return best;
}

struct Key {
  std::string model, level, scheduler;
  bool operator<(const Key& o) const {
    return std::tie(model, level, scheduler) < std::tie(o.model, o.level, o.scheduler);
  }
};

}  // namespace

bool ReproResult::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const TrendCheck& c) { return c.pass; });
}

std::string report_csv_text(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << "model,sla,scheduler,qps,qps_norm,p95_s,watts,qps_per_watt,batch,"
         "threshold,accel_work_fraction\n";
  for (const auto& r : rows) {
    out << r.model << ',' << r.sla << ',' << r.scheduler << ',' << fmt(r.qps)
        << ',' << fmt(r.qps_norm) << ',' << fmt(r.p95) << ',' << fmt(r.watts)
        << ',' << fmt(r.qps_per_watt) << ',' << r.batch << ','
        << (r.threshold ? std::to_string(*r.threshold) : std::string()) << ','
        << fmt(r.accel_work_fraction) << '\n';
  }
  return out.str();
}

std::string pareto_csv_text(const SweepTable& table,
                            const std::vector<SweepRow>& front) {
  auto is_front = [&](const SweepRow& r) {
    for (const auto& f : front)
      if (f.batch_size == r.batch_size && f.threshold == r.threshold &&
          f.sla == r.sla)
        return true;
    return false;
  };
  std::ostringstream out;
  out << "p95_s,qps,batch,threshold,is_pareto\n";
  for (const auto& r : table.rows) {
    out << fmt(r.p95) << ',' << fmt(r.qps) << ',' << r.batch_size << ','
        << (r.threshold ? std::to_string(*r.threshold) : std::string()) << ','
        << (is_front(r) ? 1 : 0) << '\n';
  }
  return out.str();
}

void write_report_csv(const std::vector<ReportRow>& rows, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << report_csv_text(rows);
}

void write_pareto_csv(const SweepTable& table, const std::vector<SweepRow>& front,
                      const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << pareto_csv_text(table, front);
}

ReproResult run_repro(const ReproOptions& opts) {
  ReproResult res;
  std::vector<std::string> models = opts.models.empty() ? zoo_names() : opts.models;
  CpuPlatformSpec cpu = builtin_cpu(opts.cpu);
  std::optional<AcceleratorSpec> accel;
  if (opts.with_accel) accel = builtin_accel(opts.accel);

  TuneParams tp;
  tp.gen.base_seed = opts.base_seed;
  tp.gen.n = opts.trace_n;
  tp.seeds_to_average = opts.seeds_to_average;
  // At desk scale the per-evaluation noise on a p95-limited QPS estimate
  // is ~1.5%, so a 1% early-stop tolerance would abort genuinely rising
  // ladders on a bad draw; widen it past the noise band.
  tp.degradation_tol = 0.05;
  // Same reasoning for the noisy-tie snap: shallow (~1%) local bumps in
  // QPS(B) are not resolvable at this scale, so treat them as ties.
  tp.plateau_tol = 0.02;

  std::map<Key, ReportRow> grid;
  std::map<std::pair<std::string, std::string>, TunedConfig> tuned_cpu;
  std::map<std::pair<std::string, std::string>, TunedConfig> tuned_accel;

  // Infeasible targets are reported as batch 0 / qps 0 rather than
  // aborting the whole reproduction.
  auto try_tune = [&](const ModelSpec& m, const CpuPlatformSpec& c,
                      const std::optional<AcceleratorSpec>& a, double sla) {
    try {
      return tune(m, c, a, sla, tp);
    } catch (const InfeasibleSLA&) {
      TunedConfig t;
      t.batch_size = 0;
      return t;
    }
  };

  auto static_row = [&](const ModelSpec& m, const std::string& level) {
    SchedulerConfig cfg;
    cfg.model = m;
    cfg.cpu = cpu;
    cfg.batch_size = 25;  // max query size split across a 40-core server
    double sla = sla_target(m.name, level);
    // Average over the same seed schedule the tuner uses so static and
    // tuned cells see identical trace noise.
    double qps = 0, p95 = 0;
    int feasible = 0;
    for (int s = 0; s < tp.seeds_to_average; ++s) {
      TraceGenParams g = tp.gen;
      g.base_seed = tp.gen.base_seed + static_cast<std::uint64_t>(s) * 10007;
      QpsResult r = max_qps_under_sla(cfg, sla, g);
      qps += r.qps;
      if (r.qps > 0) {
        p95 += r.p95;
        ++feasible;
      }
    }
    qps /= tp.seeds_to_average;
    if (feasible > 0) p95 /= feasible;
    ReportRow row{m.name, level, "static", qps, 0, p95, power_watts(cpu, {}),
                  qps / power_watts(cpu, {}), 25, std::nullopt, 0};
    return row;
  };

  for (const auto& name : models) {
    ModelSpec m = builtin_model(name);
    for (const auto& level : kLevels) {
      double sla = sla_target(name, level);
      grid[{name, level, "static"}] = static_row(m, level);

      TunedConfig tc = try_tune(m, cpu, std::nullopt, sla);
      tuned_cpu[{name, level}] = tc;
      grid[{name, level, "tuned-cpu"}] =
          {name, level, "tuned-cpu", tc.qps, 0, tc.p95, power_watts(cpu, {}),
           tc.qps_per_watt, tc.batch_size, std::nullopt, 0};

      if (accel) {
        TunedConfig ta = try_tune(m, cpu, accel, sla);
        tuned_accel[{name, level}] = ta;
        double watts = power_watts(cpu, ta.offload_threshold ? accel : std::nullopt);
        grid[{name, level, "tuned-accel"}] =
            {name, level, "tuned-accel", ta.qps, 0, ta.p95, watts,
             ta.qps_per_watt, ta.batch_size, ta.offload_threshold,
             ta.accel_work_fraction};
      }
    }
  }

  // Normalize to the static baseline at the low target, per model.
  for (auto& [key, row] : grid) {
    double anchor = grid.at({key.model, "low", "static"}).qps;
    row.qps_norm = anchor > 0 ? row.qps / anchor : 0;
  }
  for (const auto& name : models)
    for (const auto& level : kLevels)
      for (const auto& sched : accel
               ? std::vector<std::string>{"static", "tuned-cpu", "tuned-accel"}
               : std::vector<std::string>{"static", "tuned-cpu"})
        res.rows.push_back(grid.at({name, level, sched}));

  auto has = [&](const std::string& m) {
    return std::find(models.begin(), models.end(), m) != models.end();
  };
  auto check = [&](const std::string& name, bool pass, const std::string& detail) {
    res.checks.push_back({name, pass, detail});
  };

  {
    bool ok = true;
    std::string detail, infeasible;
    for (const auto& name : models) {
      // Infeasible targets (batch 0) carry no knob and are skipped.
      std::vector<std::int64_t> bs;
      for (const auto& lv : kLevels) {
        std::int64_t b = tuned_cpu.at({name, lv}).batch_size;
        if (b > 0)
          bs.push_back(b);
        else
          infeasible += name + "/" + lv + " ";
      }
      if (!std::is_sorted(bs.begin(), bs.end())) {
        ok = false;
        detail += name + " ";
      }
    }
    check("batch_nondecreasing_with_sla", ok,
          (ok ? "tuned batch non-decreasing low->high for all models"
              : "violated by: " + detail) +
              (infeasible.empty() ? "" : "; infeasible targets: " + infeasible));
  }

  if (has("DLRM-RMC3")) {
    // Intermediate 66 ms target sits between the low and medium levels.
    TunedConfig t66 = tune(builtin_model("DLRM-RMC3"), cpu, std::nullopt, 0.066, tp);
    auto med = tuned_cpu.at({"DLRM-RMC3", "medium"}).batch_size;
    check("rmc3_batch_strictly_increases_low_to_medium", med > t66.batch_size,
          "B(66ms)=" + std::to_string(t66.batch_size) +
              " B(100ms)=" + std::to_string(med));
  }

  if (has("DLRM-RMC1") && has("DLRM-RMC3") && has("DIN") && has("WND")) {
    auto bh = [&](const std::string& m) {
      return tuned_cpu.at({m, "high"}).batch_size;
    };
    bool ok = bh("DLRM-RMC1") > bh("DLRM-RMC3") && bh("DIN") > bh("WND");
    check("model_batch_ordering_at_high_sla", ok,
          "RMC1=" + std::to_string(bh("DLRM-RMC1")) +
              " RMC3=" + std::to_string(bh("DLRM-RMC3")) +
              " DIN=" + std::to_string(bh("DIN")) +
              " WND=" + std::to_string(bh("WND")));
  }

  if (has("DLRM-RMC3")) {
    TunedConfig bdw =
        tune(builtin_model("DLRM-RMC3"), builtin_cpu("broadwell"), std::nullopt,
             sla_target("DLRM-RMC3", "medium"), tp);
    auto skl = tuned_cpu.at({"DLRM-RMC3", "medium"}).batch_size;
    check("broadwell_batch_ge_skylake", bdw.batch_size >= skl,
          "broadwell=" + std::to_string(bdw.batch_size) +
              " skylake=" + std::to_string(skl));
  }

  {
    bool ok = true;
    double log_sum = 0;
    int count = 0;
    std::string detail;
    for (const auto& name : models) {
      for (const auto& level : kLevels) {
        double st = grid.at({name, level, "static"}).qps;
        double tu = tuned_cpu.at({name, level}).qps;
        if (tu + 1e-9 < st) {
          ok = false;
          detail += name + "/" + level + " ";
        }
        if (level == "medium" && st > 0) {
          log_sum += std::log(tu / st);
          ++count;
        }
      }
    }
    double geomean = count ? std::exp(log_sum / count) : 0;
    check("tuned_cpu_dominates_static", ok && geomean >= 1.5,
          "geomean medium speedup = " + fmt(geomean) +
              (detail.empty() ? "" : "; regressions: " + detail));
  }

  if (accel) {
    bool ok = true;
    std::string detail;
    for (const auto& name : models)
      for (const auto& level : kLevels) {
        double c = tuned_cpu.at({name, level}).qps;
        double a = tuned_accel.at({name, level}).qps;
        if (a + 1e-9 < c) {
          ok = false;
          detail += name + "/" + level + " ";
        }
      }
    check("tuned_accel_ge_tuned_cpu", ok,
          ok ? "accelerated QPS >= CPU-only everywhere"
             : "violated by: " + detail);
  }

  if (accel && has("DLRM-RMC1")) {
    auto f = [&](const std::string& lv) {
      return tuned_accel.at({"DLRM-RMC1", lv}).accel_work_fraction;
    };
    bool ok = f("low") + 1e-9 >= f("medium") && f("medium") + 1e-9 >= f("high");
    check("offload_fraction_nonincreasing_with_sla", ok,
          "low=" + fmt(f("low")) + " medium=" + fmt(f("medium")) +
              " high=" + fmt(f("high")));

    ModelSpec m = builtin_model("DLRM-RMC1");
    double cpu_floor = min_feasible_p95(m, cpu, std::nullopt, tp.gen);
    double accel_floor = min_feasible_p95(m, cpu, accel, tp.gen);
    check("accel_reaches_lower_p95_floor", accel_floor < cpu_floor,
          "cpu_floor=" + fmt(cpu_floor) + "s accel_floor=" + fmt(accel_floor) + "s");

    double qpw_cpu = tuned_cpu.at({"DLRM-RMC1", "high"}).qps_per_watt;
    double qpw_acc = tuned_accel.at({"DLRM-RMC1", "high"}).qps /
                     power_watts(cpu, accel);
    check("cpu_only_more_efficient_at_high_sla", qpw_cpu > qpw_acc,
          "cpu=" + fmt(qpw_cpu) + " accel=" + fmt(qpw_acc) + " qps/W");
  }

  if (has("DLRM-RMC1")) {
    // Knobs tuned against a lognormal size distribution, replayed on the
    // production distribution.
    ModelSpec m = builtin_model("DLRM-RMC1");
    TuneParams ln_tp = tp;
    ln_tp.gen.dist = SizeDistribution::log_normal(std::log(30.0), 0.5);
    bool ok = true;
    std::string detail;
    for (const auto& level : kLevels) {
      double sla = sla_target("DLRM-RMC1", level);
      TunedConfig ln = tune(m, cpu, std::nullopt, sla, ln_tp);
      SchedulerConfig cfg;
      cfg.model = m;
      cfg.cpu = cpu;
      cfg.batch_size = ln.batch_size;
      double replay = 0;
      for (int s = 0; s < tp.seeds_to_average; ++s) {
        TraceGenParams g = tp.gen;
        g.base_seed = tp.gen.base_seed + static_cast<std::uint64_t>(s) * 10007;
        replay += max_qps_under_sla(cfg, sla, g).qps;
      }
      replay /= tp.seeds_to_average;
      double native = tuned_cpu.at({"DLRM-RMC1", level}).qps;
      detail += level + ": " + fmt(replay) + " vs " + fmt(native) + "; ";
      if (!(replay < native)) ok = false;
    }
    check("lognormal_knobs_degrade_on_production", ok, detail);
  }

  // Small design-space sweep for the Pareto export.
  if (has("DLRM-RMC1")) {
    std::vector<std::optional<std::int64_t>> thresholds = {std::nullopt};
    if (accel) {
      thresholds.push_back(128);
      thresholds.push_back(512);
    }
    res.pareto_table = sweep(builtin_model("DLRM-RMC1"), cpu, accel,
                             {sla_target("DLRM-RMC1", "medium")},
                             {16, 64, 256, 1024}, thresholds, tp.gen);
    res.pareto_rows = pareto(res.pareto_table);
  }

  if (!opts.out_dir.empty()) {
    write_report_csv(res.rows, opts.out_dir + "/report.csv");
    if (!res.pareto_table.rows.empty())
      write_pareto_csv(res.pareto_table, res.pareto_rows,
                       opts.out_dir + "/pareto.csv");
  }
  return res;
}

}  // namespace recsim
