// Apache License, Version 2.0, refer to LICENSE.txt
//
// Counter-based splittable PRNG plus the parametric samplers the generative
// schemes are built from. Every draw is deterministic given the stream, and
// split() children are independent of the parent and of each other, so
// per-day / per-user streams stay reproducible under any evaluation order.

#ifndef ABHORIZON_RNG_HPP
#define ABHORIZON_RNG_HPP

#include <cstdint>
#include <span>

namespace abh {

class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : state_(mix(seed ^ kGolden)) {}

  std::uint64_t next_u64() {
    state_ += kGolden;
    return mix(state_);
  }

  /// Uniform on [0, 1), 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on the open interval (0, 1).
  double next_open_double() {
    double u;
    do {
      u = next_double();
    } while (u == 0.0);
    return u;
  }

  /// Child stream keyed by `stream`; does not perturb this generator.
  SplitRng split(std::uint64_t stream) const {
    SplitRng child(0);
    child.state_ = mix(state_ ^ mix(stream + kGolden));
    return child;
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
};

double normal_draw(SplitRng& rng);
double gamma_draw(SplitRng& rng, double shape, double rate);
double beta_draw(SplitRng& rng, double a, double b);
std::int64_t poisson_draw(SplitRng& rng, double mean);

/// NegBin(failures, p) realized as Poisson mixed over Gamma.
std::int64_t negbin_draw(SplitRng& rng, double failures, double p);

/// NegBin conditioned >= 1: rejection, inverse-CDF walk when the acceptance
/// probability drops below 0.1.
std::int64_t truncated_negbin_draw(SplitRng& rng, double failures, double p);

/// Poisson conditioned >= 1, same strategy.
std::int64_t truncated_poisson_draw(SplitRng& rng, double mean);

/// Index draw proportional to `weights` (nonnegative, not all zero).
std::size_t discrete_pmf_draw(SplitRng& rng, std::span<const double> weights);

}  // namespace abh

#endif  // ABHORIZON_RNG_HPP
