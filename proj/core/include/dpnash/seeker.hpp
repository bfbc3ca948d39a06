#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dpnash/errors.hpp"
#include "dpnash/game.hpp"
#include "dpnash/privacy.hpp"
#include "dpnash/topology.hpp"

namespace dpnash {

struct AlgorithmParams {
  double c = 1.0;   // initial stepsize
  double q = 0.9;   // geometric decay; the stepsize at k is c * q^k
  long k_max = 0;   // iteration horizon

  void validate() const;
  double stepsize(long k) const;

  // Smallest k with c * q^k < 1e-8; past that point steps are numerically
  // null (175 for c=1, q=0.9).
  static long default_horizon(double c, double q);
};

struct SeekerState {
  long k = 0;
  Eigen::VectorXd x;  // actions
  Eigen::VectorXd y;  // average-action estimates
};

struct Trace {
  // States at the requested iterations (every iteration under full recording).
  std::vector<SeekerState> snapshots;
  // Transmitted values p(k) = y(k) + w(k) and the noise w(k), for
  // k = 0..k_max-1; retained only under full recording.
  std::vector<Eigen::VectorXd> transmitted;
  std::vector<Eigen::VectorXd> noises;
  SeekerState final_state;
};

struct RunOptions {
  bool record_full = false;
  // Iterations to snapshot when not recording fully; must be sorted strictly
  // increasing.
  std::vector<long> probes;
  double divergence_guard = 1e12;
};

// One update from state.k: draw noise, publish p = y + w, gradient step using
// the local average estimate, then consensus on the published values:
//   x(k+1) = x(k) - a_k g_i(x_i(k), y_i(k))
//   y(k+1) = A p(k) + x(k+1) - x(k)
// The weights should come from a validated Topology or TopologySchedule.
SeekerState step(const AggregativeGame& game, const Eigen::MatrixXd& weights,
                 const AlgorithmParams& params, const NoiseStream& noise,
                 const SeekerState& state);
SeekerState step(const AggregativeGame& game, const Topology& topo,
                 const AlgorithmParams& params, const NoiseStream& noise,
                 const SeekerState& state);
SeekerState step(const AggregativeGame& game, const TopologySchedule& schedule,
                 const AlgorithmParams& params, const NoiseStream& noise,
                 const SeekerState& state);

// Iterates from y(0) = x(0) = x0 to k_max.
Trace run(const AggregativeGame& game, const Topology& topo,
          const AlgorithmParams& params, const NoiseStream& noise,
          const Eigen::VectorXd& x0, const RunOptions& opts = {});

// Same iteration with the weight matrix drawn from the schedule by k mod
// period; a period-1 schedule reproduces run() bit for bit.
Trace run_time_varying(const AggregativeGame& game, const TopologySchedule& schedule,
                       const AlgorithmParams& params, const NoiseStream& noise,
                       const Eigen::VectorXd& x0, const RunOptions& opts = {});

}  // namespace dpnash
