#include "recsim/loadgen.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "recsim/rng.hpp"

namespace recsim {

SizeDistribution SizeDistribution::production_heavy_tail() {
  SizeDistribution d;
  d.kind = Kind::ProductionHeavyTail;
  d.p0 = std::log(300.0);  // body_mu
  d.p1 = 0.5;              // body_sigma
  d.p2 = 1.1;              // tail_alpha
  d.p3 = 0.25;             // tail_weight
  return d;
}

SizeDistribution SizeDistribution::fixed(std::int64_t size) {
  SizeDistribution d;
  d.kind = Kind::Fixed;
  d.p0 = static_cast<double>(size);
  return d;
}

SizeDistribution SizeDistribution::log_normal(double mu, double sigma) {
  SizeDistribution d;
  d.kind = Kind::LogNormal;
  d.p0 = mu;
  d.p1 = sigma;
  return d;
}

SizeDistribution SizeDistribution::normal(double mu, double sigma) {
  SizeDistribution d;
  d.kind = Kind::Normal;
  d.p0 = mu;
  d.p1 = sigma;
  return d;
}

void SizeDistribution::validate() const {
  for (double p : {p0, p1, p2, p3})
    if (!std::isfinite(p)) throw InvalidDistribution("non-finite distribution parameter");
  if (max_size < 1) throw InvalidDistribution("max_size < 1");
  if (kind == Kind::ProductionHeavyTail) {
    if (p2 <= 0) throw InvalidDistribution("tail_alpha must be positive");
    if (p3 < 0 || p3 > 1) throw InvalidDistribution("tail_weight outside [0, 1]");
  }
}

std::string SizeDistribution::describe() const {
  char buf[128];
  switch (kind) {
    case Kind::Fixed:
      std::snprintf(buf, sizeof buf, "Fixed(%g)", p0);
      break;
    case Kind::Normal:
      std::snprintf(buf, sizeof buf, "Normal(%g,%g)", p0, p1);
      break;
    case Kind::LogNormal:
      std::snprintf(buf, sizeof buf, "LogNormal(%g,%g)", p0, p1);
      break;
    case Kind::ProductionHeavyTail:
      std::snprintf(buf, sizeof buf, "ProductionHeavyTail(%g,%g,%g,%g)", p0, p1,
                    p2, p3);
      break;
  }
  return buf;
}

namespace {

std::int64_t sample_size(Rng& rng, const SizeDistribution& d) {
  double x = 0;
  switch (d.kind) {
    case SizeDistribution::Kind::Fixed:
      x = d.p0;
      break;
    case SizeDistribution::Kind::Normal:
      x = rng.normal(d.p0, d.p1);
      break;
    case SizeDistribution::Kind::LogNormal:
      x = rng.lognormal(d.p0, d.p1);
      break;
    case SizeDistribution::Kind::ProductionHeavyTail: {
      // Mixture: body lognormal with probability 1 - tail_weight, Pareto
      // tail anchored at the body median otherwise.
      bool tail = rng.uniform() < d.p3;
      x = tail ? rng.pareto(std::exp(d.p0), d.p2) : rng.lognormal(d.p0, d.p1);
      break;
    }
  }
  auto s = static_cast<std::int64_t>(std::llround(x));
  return std::clamp<std::int64_t>(s, 1, d.max_size);
}

}  // namespace

QueryTrace gen_trace(std::uint64_t seed, double lambda,
                     const SizeDistribution& dist, std::int64_t n) {
  if (lambda <= 0 || !std::isfinite(lambda))
    throw InvalidDistribution("lambda must be positive and finite");
  if (n < 1) throw std::invalid_argument("n < 1");
  dist.validate();

  QueryTrace t;
  t.seed = seed;
  t.lambda = lambda;
  t.distribution = dist;
  t.records.reserve(static_cast<std::size_t>(n));
  Rng rng(seed);
  double now = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    now += rng.exponential(lambda);
    t.records.push_back({now, sample_size(rng, dist)});
  }
  return t;
}

TraceStats trace_stats(const QueryTrace& trace) {
  if (trace.records.empty()) throw std::invalid_argument("empty trace");
  const std::size_t n = trace.records.size();
  std::vector<std::int64_t> sizes(n);
  for (std::size_t i = 0; i < n; ++i) sizes[i] = trace.records[i].size;
  std::sort(sizes.begin(), sizes.end());

  auto pct = [&](double p) {
    std::size_t idx = static_cast<std::size_t>(
        std::ceil(p / 100.0 * static_cast<double>(n)));
    return static_cast<double>(sizes[std::max<std::size_t>(idx, 1) - 1]);
  };

  TraceStats st;
  double total = static_cast<double>(
      std::accumulate(sizes.begin(), sizes.end(), std::int64_t{0}));
  st.mean_size = total / static_cast<double>(n);
  st.p50_size = pct(50);
  st.p95_size = pct(95);
  st.p99_size = pct(99);
  st.max_size = static_cast<double>(sizes.back());
  st.mean_gap = n > 1 ? (trace.records.back().arrival_time -
                         trace.records.front().arrival_time) /
                            static_cast<double>(n - 1)
                      : 0.0;
  std::size_t top = n / 4;
  double top_sum = 0;
  for (std::size_t i = n - top; i < n; ++i)
    top_sum += static_cast<double>(sizes[i]);
  st.top_quartile_work_share = total > 0 ? top_sum / total : 0.0;
  return st;
}

void export_trace(const QueryTrace& trace, std::ostream& out) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "#recsim-trace v1 seed=%" PRIu64 " lambda=%.17g\n",
                trace.seed, trace.lambda);
  out << buf;
  for (const auto& r : trace.records) {
    std::snprintf(buf, sizeof buf, "%.17g\t%" PRId64 "\n", r.arrival_time, r.size);
    out << buf;
  }
}

void export_trace_file(const QueryTrace& trace, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for write: " + path);
  export_trace(trace, f);
}

QueryTrace import_trace(std::istream& in) {
  QueryTrace t;
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw ParseError("empty file", lineno);
  if (std::sscanf(line.c_str(), "#recsim-trace v1 seed=%" SCNu64 " lambda=%lg",
                  &t.seed, &t.lambda) != 2)
    throw ParseError("bad header", lineno);

  double prev = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    QueryRecord r;
    if (std::sscanf(line.c_str(), "%lg\t%" SCNd64, &r.arrival_time, &r.size) != 2)
      throw ParseError("bad record", lineno);
    if (r.size < 1) throw ParseError("size < 1", lineno);
    if (r.arrival_time < prev) throw ParseError("arrival times not sorted", lineno);
    prev = r.arrival_time;
    t.records.push_back(r);
  }
  if (t.records.empty()) throw ParseError("trace has no records", lineno);
  return t;
}

QueryTrace import_trace_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  return import_trace(f);
}

}  // namespace recsim
