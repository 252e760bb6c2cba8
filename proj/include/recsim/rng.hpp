#ifndef RECSIM_RNG_HPP
#define RECSIM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace recsim {

// Seeded generator with explicit inverse-CDF samplers. The standard
// <random> distributions are implementation-defined, so traces produced
// with them would differ across standard libraries; these samplers pin
// the exact bit stream to mt19937_64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1) with 53 bits of mantissa.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Uniform in (0, 1], safe as a log() argument.
  double uniform_pos() { return 1.0 - uniform(); }

  double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

  // Box-Muller, one draw per call (the sine half is discarded so the
  // stream does not depend on call parity).
  double normal(double mean, double stddev) {
    double u1 = uniform_pos();
    double u2 = uniform();
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    return mean + stddev * z;
  }

  double lognormal(double mu, double sigma) {
    return std::exp(normal(mu, sigma));
  }

  double pareto(double x_min, double shape) {
    return x_min * std::pow(uniform_pos(), -1.0 / shape);
  }

  std::uint64_t next_u64() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace recsim

#endif  // RECSIM_RNG_HPP
