#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "dpnash/game.hpp"
#include "dpnash/privacy.hpp"
#include "dpnash/seeker.hpp"
#include "dpnash/topology.hpp"

namespace dpnash {

// Two games whose player costs coincide for every player but one.
struct AdjacentPair {
  const AggregativeGame* base = nullptr;
  const AggregativeGame* variant = nullptr;
  int differing_player = -1;
};

// Certifies adjacency numerically: costs sampled across the box must coincide
// exactly for all but one player, whose index is inferred and returned.
AdjacentPair make_adjacent_pair(const AggregativeGame& base,
                                const AggregativeGame& variant,
                                const Box& sample_box,
                                std::uint64_t probe_seed = 0x9E3779B97F4A7C15ull);

struct SensitivityAudit {
  double epsilon = 0.0;              // certified budget for the pair
  double gradient_bound = 0.0;       // C used in the budget
  long horizon = 0;

  // The coupled executions share one observation sequence; re-emitting
  // p = y + w from the offset noise must reproduce it within drift_tolerance
  // (exactly, up to rounding).
  double max_observation_gap = 0.0;
  bool observations_identical = false;  // gap is exactly zero
  double max_coupling_residual = 0.0;   // max_k |(w1 - w2) + dy| at the swapped player

  // Per-step leakage |dy(k)| against the allowance 2 C a_k, and the summed
  // budget sum_k |dy(k)| / (d q_bar^k).
  double min_step_margin = 0.0;
  double budget_sum = 0.0;
  double budget_margin = 0.0;
  double drift_tolerance = 1e-9;
  std::vector<double> deviation;  // |dy(k)| for k = 0..horizon-1

  bool pass = false;
};

// Runs the coupled pair of executions: identical noise for all players except
// the differing one, whose noise absorbs the estimate deviation so both
// executions transmit the same observations.  Verifies the per-step and
// cumulative leakage bounds that price the budget epsilon = 2cCq_bar/(d(q_bar-q)).
SensitivityAudit sensitivity_audit(const AdjacentPair& pair,
                                   const AlgorithmParams& params,
                                   const NoiseParams& noise, const Topology& topo,
                                   const Eigen::VectorXd& x0, std::uint64_t seed,
                                   double gradient_bound);

}  // namespace dpnash
