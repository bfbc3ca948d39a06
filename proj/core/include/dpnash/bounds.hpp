#pragma once

#include <optional>

#include "dpnash/errors.hpp"
#include "dpnash/game.hpp"

namespace dpnash {

struct BoundInputs {
  GameConstants constants;
  int players = 0;
  double c = 0.0;
  double q = 0.0;
  double d = 0.0;
  double q_bar = 0.0;
  double initial_estimate_bound = 0.0;  // max_i |y_i(0)|
  double initial_distance = 0.0;        // ||x(0) - x*||

  // Fixed topology: contraction factor of the weight matrix.
  std::optional<double> gamma;
  // Switching schedule: transition-product envelope constants.
  std::optional<double> theta;
  std::optional<double> beta;

  void validate() const;
};

struct BoundReport {
  double initial_error_term = 0.0;   // C2^2 e^{-mc/(1-q)}
  double stepsize_term = 0.0;        // c^2 N C^2 / (1 - q^2)
  double estimation_lag_term = 0.0;  // consensus-lag contribution
  double noise_term = 0.0;           // privacy-noise contribution
  double mse_limit = 0.0;            // sum of the four terms
  double noise_scale = 0.0;          // d the report was evaluated at
  double epsilon = 0.0;              // budget at (c, q, d, q_bar, C); inf at d = 0
  bool time_varying = false;
};

// Expected absolute drift of the estimate sum from the action sum:
// N d (1 - q_bar^k) / (1 - q_bar); exactly 0 at k = 0 or d = 0.
double consensus_drift_bound(int players, double d, double q_bar, long k);

// Bound on E|y_i(k) - mean(x(k))| for k >= 1 under a fixed topology.  Near-
// equal decay rates (|gamma - q| or |gamma - q_bar| < 1e-9) evaluate the
// continuous limit k gamma^{k-1} of the divided difference.
double estimation_error_bound(const BoundInputs& inputs, long k);

// Same bound under a periodic schedule, with (theta, beta) in place of the
// fixed-topology prefactors.
double estimation_error_bound_tv(const BoundInputs& inputs, long k);

// Limiting mean-square error bound D for the fixed topology.
BoundReport mse_bound(const BoundInputs& inputs);

// Limiting bound for switching topologies.
BoundReport mse_bound_tv(const BoundInputs& inputs);

// D as a function of the privacy budget: the noise term is rewritten in
// epsilon, eliminating d.  Agrees with mse_bound at d = scale_for_epsilon(...)
// to 1e-12 relative error.
BoundReport mse_bound_for_epsilon(const BoundInputs& inputs, double epsilon);

struct TuneGrid {
  double c_lo = 0.01;
  double c_hi = 10.0;
  int c_points = 41;   // log-spaced, endpoints included
  double q_lo = 0.05;
  double q_hi = 0.995;
  int q_points = 60;   // linearly spaced, endpoints included
};

struct TuneResult {
  double c = 0.0;
  double q = 0.0;
  BoundReport report;
};

// Exhaustive grid minimization of mse_bound_for_epsilon over (c, q) at a
// fixed budget.  q_bar is pinned during tuning (default close to 1, where the
// bound improves monotonically) and must exceed every grid q.
TuneResult tune_parameters(const BoundInputs& base, double epsilon,
                           const TuneGrid& grid = {}, double q_bar = 1.0 - 1e-3);

}  // namespace dpnash
