#include "dpnash/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace dpnash {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

}  // namespace

AdjacentPair make_adjacent_pair(const AggregativeGame& base,
                                const AggregativeGame& variant,
                                const Box& sample_box, std::uint64_t probe_seed) {
  const int n = base.players();
  require(variant.players() == n, "adjacent games must have equal player counts");
  sample_box.validate();
  require(sample_box.lower.size() == n, "sample box dimension does not match games");

  std::mt19937_64 rng(probe_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr int kSamples = 64;
  std::vector<int> differing;
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) {
    bool differs = false;
    for (int s = 0; s < kSamples && !differs; ++s) {
      for (int j = 0; j < n; ++j)
        x[j] = sample_box.lower[j] +
               unit(rng) * (sample_box.upper[j] - sample_box.lower[j]);
      differs = base.cost(i, x) != variant.cost(i, x);
    }
    if (differs) differing.push_back(i);
  }
  require(!differing.empty(), "games are not adjacent: all player costs coincide");
  if (differing.size() > 1) {
    std::string who;
    for (int i : differing) who += (who.empty() ? "" : ", ") + std::to_string(i);
    throw ValidationError("games are not adjacent: costs differ for players " + who);
  }
  return {&base, &variant, differing.front()};
}

SensitivityAudit sensitivity_audit(const AdjacentPair& pair,
                                   const AlgorithmParams& params,
                                   const NoiseParams& noise, const Topology& topo,
                                   const Eigen::VectorXd& x0, std::uint64_t seed,
                                   double gradient_bound) {
  require(pair.base != nullptr && pair.variant != nullptr, "pair is incomplete");
  const int n = pair.base->players();
  require(pair.variant->players() == n, "pair player counts differ");
  require(pair.differing_player >= 0 && pair.differing_player < n,
          "differing player index out of range");
  params.validate();
  noise.validate();
  require(noise.d > 0.0,
          "noise scale d must be positive: a zero-noise run has no finite budget");
  require(topo.size() == n, "topology size does not match player count");
  require(gradient_bound > 0.0, "gradient bound C must be positive");

  const int i0 = pair.differing_player;
  const NoiseStream stream(noise, seed, 0);

  RunOptions opts;
  opts.record_full = true;
  const Trace base_trace = run(*pair.base, topo, params, stream, x0, opts);

  SensitivityAudit audit;
  audit.horizon = params.k_max;
  audit.gradient_bound = gradient_bound;
  audit.epsilon = epsilon_of(params.c, params.q, noise.d, noise.q_bar, gradient_bound);
  audit.deviation.reserve(static_cast<size_t>(params.k_max));
  audit.min_step_margin = std::numeric_limits<double>::infinity();

  Eigen::VectorXd x2 = x0;
  Eigen::VectorXd y2 = x0;
  Eigen::VectorXd grad(n), x2_prev(n);
  const Eigen::MatrixXd& weights = topo.weights();

  for (long k = 0; k < params.k_max; ++k) {
    const Eigen::VectorXd& x1 = base_trace.snapshots[static_cast<size_t>(k)].x;
    const Eigen::VectorXd& y1 = base_trace.snapshots[static_cast<size_t>(k)].y;
    const Eigen::VectorXd& p_shared = base_trace.transmitted[static_cast<size_t>(k)];
    const Eigen::VectorXd& w1 = base_trace.noises[static_cast<size_t>(k)];

    // The coupled execution keeps w2_i = w1_i away from i0 and derives
    // w2_{i0} = p_{i0} - y2_{i0}, the unique offset reproducing the shared
    // observation.  Re-emission must then match p bitwise up to rounding.
    for (int i = 0; i < n; ++i) {
      const double w2_i = i == i0 ? p_shared[i0] - y2[i0] : w1[i];
      const double gap = std::abs((y2[i] + w2_i) - p_shared[i]);
      audit.max_observation_gap = std::max(audit.max_observation_gap, gap);
      if (i != i0 && (x2[i] != x1[i] || y2[i] != y1[i]))
        throw ValidationError(
            "coupled executions diverged at an unchanged player (internal "
            "invariant violated at iteration " +
            std::to_string(k) + ")");
    }
    const double dy = y1[i0] - y2[i0];
    const double w2_i0 = p_shared[i0] - y2[i0];
    audit.max_coupling_residual =
        std::max(audit.max_coupling_residual, std::abs((w1[i0] - w2_i0) + dy));

    const double allowance = 2.0 * gradient_bound * params.stepsize(k);
    audit.deviation.push_back(std::abs(dy));
    audit.min_step_margin = std::min(audit.min_step_margin, allowance - std::abs(dy));
    audit.budget_sum += std::abs(dy) / stream.scale_at(k);

    const double alpha = params.stepsize(k);
    for (int i = 0; i < n; ++i)
      grad[i] = pair.variant->partial_gradient_estimated(i, x2[i], y2[i]);
    x2_prev = x2;
    x2 -= alpha * grad;
    y2.noalias() = weights * p_shared;
    y2 += x2 - x2_prev;
  }

  audit.observations_identical = audit.max_observation_gap == 0.0;
  audit.budget_margin = audit.epsilon + audit.drift_tolerance - audit.budget_sum;
  audit.pass = audit.max_observation_gap <= audit.drift_tolerance &&
               audit.max_coupling_residual <= audit.drift_tolerance &&
               audit.min_step_margin >= 0.0 &&
               audit.budget_sum <= audit.epsilon + audit.drift_tolerance;
  return audit;
}

}  // namespace dpnash
