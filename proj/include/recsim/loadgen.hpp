#ifndef RECSIM_LOADGEN_HPP
#define RECSIM_LOADGEN_HPP

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace recsim {

struct InvalidDistribution : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, std::size_t line)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ")"),
        line_number(line) {}
  std::size_t line_number;
};

struct SizeDistribution {
  enum class Kind { Fixed, Normal, LogNormal, ProductionHeavyTail };
  Kind kind = Kind::Fixed;
  // Fixed: p0 = size. Normal/LogNormal: p0 = mu, p1 = sigma.
  // ProductionHeavyTail: p0 = body_mu, p1 = body_sigma, p2 = tail_alpha,
  // p3 = tail_weight.
  double p0 = 25, p1 = 0, p2 = 0, p3 = 0;
  std::int64_t max_size = 1000;

  // Lognormal body with median 30 plus a 12% Pareto tail, calibrated so
  // the largest quartile of queries carries about half the total items.
  static SizeDistribution production_heavy_tail();
  static SizeDistribution fixed(std::int64_t size);
  static SizeDistribution log_normal(double mu, double sigma);
  static SizeDistribution normal(double mu, double sigma);

  void validate() const;
  std::string describe() const;
  bool operator==(const SizeDistribution&) const = default;
};

struct QueryRecord {
  double arrival_time = 0;  // seconds
  std::int64_t size = 1;    // items
  bool operator==(const QueryRecord&) const = default;
};

struct QueryTrace {
  std::uint64_t seed = 0;
  double lambda = 0;  // queries/s
  SizeDistribution distribution;
  std::vector<QueryRecord> records;
};

struct TraceStats {
  double mean_size = 0;
  double p50_size = 0, p95_size = 0, p99_size = 0, max_size = 0;
  double mean_gap = 0;
  double top_quartile_work_share = 0;
};

// Poisson arrivals crossed with i.i.d. sizes from `dist`; bit-identical
// for identical (seed, parameters).
QueryTrace gen_trace(std::uint64_t seed, double lambda,
                     const SizeDistribution& dist, std::int64_t n);

TraceStats trace_stats(const QueryTrace& trace);

void export_trace(const QueryTrace& trace, std::ostream& out);
void export_trace_file(const QueryTrace& trace, const std::string& path);
QueryTrace import_trace(std::istream& in);
QueryTrace import_trace_file(const std::string& path);

}  // namespace recsim

#endif  // RECSIM_LOADGEN_HPP
