#include "recsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <unordered_map>

namespace recsim {

void SchedulerConfig::validate() const {
  if (batch_size < 1) throw ConfigError("batch_size < 1");
  if (offload_threshold) {
    if (*offload_threshold < 1) throw ConfigError("offload_threshold < 1");
    if (!accel) throw ConfigError("offload_threshold set without an accelerator");
  }
  if (warmup_fraction < 0 || warmup_fraction > 0.5)
    throw ConfigError("warmup_fraction outside [0, 0.5]");
  model.validate();
  cpu.validate();
  if (accel) accel->validate();
}

namespace {

struct Event {
  double time;
  int kind;  // 0 = cpu request done, 1 = accel job done; below any arrival at equal time
  std::uint64_t seq;
  std::int64_t query;
  std::int64_t items;

  bool operator>(const Event& o) const {
    if (time != o.time) return time > o.time;
    if (kind != o.kind) return kind > o.kind;
    return seq > o.seq;
  }
};

struct QueryState {
  std::int64_t remaining = 0;  // outstanding requests
  double completion = -1;
};

struct PendingRequest {
  std::int64_t query;
  std::int64_t items;
};

// Per-batch work cache; request batches repeat heavily (B plus the
// remainder sizes), so this stays small.
class WorkCache {
 public:
  explicit WorkCache(const ModelSpec& model) : model_(model) {}
  const WorkBreakdown& get(std::int64_t batch) {
    auto it = cache_.find(batch);
    if (it == cache_.end())
      it = cache_.emplace(batch, work(model_, batch)).first;
    return it->second;
  }

 private:
  const ModelSpec& model_;
  std::unordered_map<std::int64_t, WorkBreakdown> cache_;
};

}  // namespace

SimResult simulate(const QueryTrace& trace, const SchedulerConfig& cfg,
                   const EventLogger& logger) {
  cfg.validate();
  if (trace.records.empty()) throw std::invalid_argument("empty trace");

  const std::int64_t n = static_cast<std::int64_t>(trace.records.size());
  const std::int64_t warmup_count =
      static_cast<std::int64_t>(std::floor(cfg.warmup_fraction * static_cast<double>(n)));
  const std::int64_t cores = cfg.cpu.cores;
  const std::int64_t batch = cfg.batch_size;

  WorkCache cpu_work(cfg.model);
  std::unordered_map<std::int64_t, double> accel_cache;
  auto accel_time = [&](std::int64_t size) {
    auto it = accel_cache.find(size);
    if (it == accel_cache.end())
      it = accel_cache.emplace(size, accel_service_time(cfg.model, size, *cfg.accel).total)
               .first;
    return it->second;
  };

  std::vector<QueryState> queries(static_cast<std::size_t>(n));
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> events;
  std::uint64_t seq = 0;

  std::deque<PendingRequest> cpu_fifo;
  std::deque<std::int64_t> accel_fifo;
  std::int64_t busy_cores = 0;
  bool accel_busy = false;

  double core_busy_time = 0;
  double accel_busy_time = 0;
  double offloaded_items = 0;
  double total_items = 0;  // post-warmup
  double offloaded_items_pw = 0;
  double last_completion = 0;

  SimResult res;
  res.latencies.reserve(static_cast<std::size_t>(n - warmup_count));
  res.outcomes.reserve(static_cast<std::size_t>(n - warmup_count));

  auto log = [&](double t, SimEvent::Kind k, std::int64_t q, std::int64_t items) {
    if (logger) logger({t, k, q, items, busy_cores});
  };

  auto dispatch_cpu = [&](double now) {
    while (busy_cores < cores && !cpu_fifo.empty()) {
      PendingRequest r = cpu_fifo.front();
      cpu_fifo.pop_front();
      ++busy_cores;  // active-core count sampled at dispatch, self included
      double s = cpu_service_time(cpu_work.get(r.items), r.items, busy_cores, cfg.cpu).total;
      core_busy_time += s;
      events.push({now + s, 0, seq++, r.query, r.items});
      log(now, SimEvent::Kind::Dispatch, r.query, r.items);
    }
  };

  auto start_accel = [&](double now) {
    if (accel_busy || accel_fifo.empty()) return;
    std::int64_t q = accel_fifo.front();
    accel_fifo.pop_front();
    accel_busy = true;
    std::int64_t size = trace.records[static_cast<std::size_t>(q)].size;
    double s = accel_time(size);
    accel_busy_time += s;
    events.push({now + s, 1, seq++, q, size});
    log(now, SimEvent::Kind::AccelStart, q, size);
  };

  auto complete_query = [&](std::int64_t q, double now, bool on_accel) {
    const auto& rec = trace.records[static_cast<std::size_t>(q)];
    queries[static_cast<std::size_t>(q)].completion = now;
    last_completion = std::max(last_completion, now);
    if (q >= warmup_count) {
      double lat = now - rec.arrival_time;
      res.latencies.push_back(lat);
      res.outcomes.push_back({rec.arrival_time, rec.size, lat, on_accel});
      ++res.completed;
      total_items += static_cast<double>(rec.size);
      if (on_accel) offloaded_items_pw += static_cast<double>(rec.size);
    }
  };

  std::int64_t next_arrival = 0;
  while (next_arrival < n || !events.empty()) {
    bool take_event =
        !events.empty() &&
        (next_arrival >= n ||
         events.top().time <= trace.records[static_cast<std::size_t>(next_arrival)].arrival_time);
    if (take_event) {
      Event ev = events.top();
      events.pop();
      if (ev.kind == 0) {
        --busy_cores;
        log(ev.time, SimEvent::Kind::CpuDone, ev.query, ev.items);
        if (--queries[static_cast<std::size_t>(ev.query)].remaining == 0)
          complete_query(ev.query, ev.time, false);
        dispatch_cpu(ev.time);
      } else {
        accel_busy = false;
        log(ev.time, SimEvent::Kind::AccelDone, ev.query, ev.items);
        complete_query(ev.query, ev.time, true);
        start_accel(ev.time);
      }
    } else {
      const auto& rec = trace.records[static_cast<std::size_t>(next_arrival)];
      std::int64_t q = next_arrival++;
      double now = rec.arrival_time;
      log(now, SimEvent::Kind::Arrival, q, rec.size);
      if (cfg.offload_threshold && rec.size > *cfg.offload_threshold) {
        queries[static_cast<std::size_t>(q)].remaining = 1;
        offloaded_items += static_cast<double>(rec.size);
        accel_fifo.push_back(q);
        start_accel(now);
      } else {
        std::int64_t full = rec.size / batch;
        std::int64_t rem = rec.size % batch;
        queries[static_cast<std::size_t>(q)].remaining = full + (rem > 0 ? 1 : 0);
        for (std::int64_t i = 0; i < full; ++i) cpu_fifo.push_back({q, batch});
        if (rem > 0) cpu_fifo.push_back({q, rem});
        dispatch_cpu(now);
      }
    }
  }

  const double span = last_completion - trace.records.front().arrival_time;
  res.core_utilization =
      span > 0 ? core_busy_time / (span * static_cast<double>(cores)) : 0;
  res.accel_utilization = span > 0 && cfg.accel ? accel_busy_time / span : 0;
  res.accel_work_fraction = total_items > 0 ? offloaded_items_pw / total_items : 0;
  double first_pw_arrival =
      trace.records[static_cast<std::size_t>(warmup_count)].arrival_time;
  double pw_span = last_completion - first_pw_arrival;
  res.achieved_qps =
      pw_span > 0 ? static_cast<double>(res.completed) / pw_span : 0;
  return res;
}

double exact_percentile(std::vector<double> values, double p) {
  if (values.empty()) throw EmptyResult("no latencies");
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  std::size_t idx = static_cast<std::size_t>(
      std::ceil(p / 100.0 * static_cast<double>(n)));
  idx = std::max<std::size_t>(idx, 1) - 1;
  return values[std::min(idx, n - 1)];
}

LatencySummary summarize(const SimResult& result) {
  if (result.latencies.empty()) throw EmptyResult("no post-warmup queries");
  std::vector<double> v = result.latencies;
  std::sort(v.begin(), v.end());
  auto pick = [&](double p) {
    std::size_t idx = static_cast<std::size_t>(
        std::ceil(p / 100.0 * static_cast<double>(v.size())));
    return v[std::max<std::size_t>(idx, 1) - 1];
  };
  LatencySummary s;
  s.p50 = pick(50);
  s.p95 = pick(95);
  s.p99 = pick(99);
  s.max = v.back();
  double sum = 0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  return s;
}

namespace {

struct Eval {
  QpsResult r;
  bool feasible;
};

}  // namespace

QpsResult max_qps_under_sla(const SchedulerConfig& cfg, double sla,
                            const TraceGenParams& gen) {
  if (sla <= 0) throw std::invalid_argument("sla <= 0");
  cfg.validate();

  std::uint64_t eval_idx = 0;
  auto eval = [&](double lambda) -> Eval {
    QueryTrace t = gen_trace(gen.base_seed + eval_idx++, lambda, gen.dist, gen.n);
    SimResult r = simulate(t, cfg);
    LatencySummary s = summarize(r);
    return {{r.achieved_qps, lambda, s.p95, r.accel_work_fraction}, s.p95 <= sla};
  };

  // Capacity ceiling: all cores running the configured batch with the
  // whole memory system to themselves, plus headroom (and the
  // accelerator, when configured).
  QueryTrace probe = gen_trace(gen.base_seed + 0x9e3779b9, 1000.0, gen.dist,
                               std::min<std::int64_t>(gen.n, 10000));
  double mean_size = trace_stats(probe).mean_size;
  double per_item =
      cpu_service_time(cfg.model, cfg.batch_size, 1, cfg.cpu).total /
      static_cast<double>(cfg.batch_size);
  double hi = 1.5 * static_cast<double>(cfg.cpu.cores) / (mean_size * per_item);
  if (cfg.accel && cfg.offload_threshold) hi *= 2.0;
  hi = std::max(hi, 2.0);

  double lo = 1.0;
  Eval lo_eval = eval(lo);
  if (!lo_eval.feasible) return {0, 0, lo_eval.r.p95, lo_eval.r.accel_work_fraction};
  Eval hi_eval = eval(hi);
  if (hi_eval.feasible) return hi_eval.r;

  QpsResult best = lo_eval.r;
  while (hi / lo > 1.01) {
    double mid = std::sqrt(lo * hi);
    Eval e = eval(mid);
    if (e.feasible) {
      lo = mid;
      best = e.r;
    } else {
      hi = mid;
    }
  }
  return best;
}

}  // namespace recsim
