#pragma once

#include <cstdint>

#include "dpnash/errors.hpp"

namespace dpnash {

// Laplace noise schedule Lap(d * q_bar^k).  d = 0 switches noise off exactly;
// the privacy budget is only defined for d > 0.
struct NoiseParams {
  double d = 0.0;
  double q_bar = 0.99;

  void validate() const;
};

// Deterministic stream of Laplace draws keyed by (seed, replica, player,
// iteration).  The same coordinates give the same draw on any thread in any
// order, so replicated experiments are reproducible under any parallelism.
class NoiseStream {
public:
  NoiseStream(NoiseParams params, std::uint64_t seed, std::uint64_t replica = 0);

  // d * q_bar^iteration
  double scale_at(long iteration) const;

  // Unit Laplace draw via inverse CDF: w = -sign(v) ln(1 - 2|v|) with v
  // uniform on (-1/2, 1/2) and never exactly 0.
  double unit_draw(int player, long iteration) const;

  // scale_at(iteration) * unit_draw(player, iteration)
  double draw(int player, long iteration) const;

  const NoiseParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t replica() const { return replica_; }

private:
  NoiseParams params_;
  std::uint64_t seed_;
  std::uint64_t replica_;
};

// Cumulative privacy budget of the transmitted estimates against a one-player
// cost swap: epsilon = 2 c C q_bar / (d (q_bar - q)).
double epsilon_of(double c, double q, double d, double q_bar, double gradient_bound);

// Noise scale achieving a target budget; exact inverse of epsilon_of in d.
double scale_for_epsilon(double c, double q, double q_bar, double gradient_bound,
                         double target_epsilon);

}  // namespace dpnash
