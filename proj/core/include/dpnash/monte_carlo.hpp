#pragma once

#include <string>
#include <vector>

#include "dpnash/scenario.hpp"

namespace dpnash {

// Sample statistics over replicas at each probe iteration.  Matrices are
// probe-by-player; vectors are per probe.  Standard errors are
// sample-stddev / sqrt(replicas).
struct McSummary {
  std::vector<long> probes;
  int players = 0;
  int replicas = 0;

  Eigen::MatrixXd per_player_mse, per_player_mse_se;       // E (x_i - x*_i)^2
  Eigen::MatrixXd estimate_abs_error, estimate_abs_error_se;  // E |y_i - mean(x)|
  Eigen::MatrixXd estimate_bias, estimate_bias_se;         // E y_i - mean(x*)

  Eigen::VectorXd aggregate_mse, aggregate_mse_se;         // E ||x - x*||^2
  Eigen::VectorXd drift_abs, drift_abs_se;                 // E |1'y - 1'x|
  Eigen::VectorXd drift_signed, drift_signed_se;           // E (1'y - 1'x)

  Eigen::MatrixXd terminal_x, terminal_y;  // replica-by-player, at k_max
  Eigen::VectorXd equilibrium;             // x* used for the error statistics
  std::string provenance;

  double terminal_aggregate_mse() const;
  double terminal_aggregate_mse_se() const;
};

// Runs `scenario.replicas` independent replicas with replica-keyed noise
// streams.  Replicas are processed in fixed-size blocks and reduced in block
// order, so results (and emitted bytes) are identical for every job count.
McSummary run_monte_carlo(const Scenario& scenario, int jobs = 1);

struct SweepPoint {
  double d = 0.0;
  double terminal_mse = 0.0;
  double std_error = 0.0;
};

// Reruns the Monte Carlo per noise scale; same seed, so the underlying
// uniform draws are shared across scales.
std::vector<SweepPoint> sweep_noise_scale(const Scenario& scenario,
                                          const std::vector<double>& d_values,
                                          int jobs = 1);

// Freedman-Diaconis histogram of one player's terminal samples.
struct Histogram {
  int player = 0;      // 0-based
  char variable = 'x'; // 'x' action, 'y' average estimate
  double lo = 0.0;
  double bin_width = 0.0;  // 0 for a degenerate single-bin histogram
  std::vector<long> counts;

  double mode() const;  // center of the fullest bin, first on ties
};

std::vector<Histogram> terminal_distribution(const McSummary& summary);

struct DominanceCheck {
  std::string claim;
  long k = -1;
  int player = -1;  // -1 for aggregate claims
  double empirical = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // bound + 4 se - empirical
  bool pass = false;
};

struct DominanceVerdict {
  std::vector<DominanceCheck> checks;
  double min_margin = 0.0;
  bool pass = true;
};

// Verifies every empirical curve sits below its bound curve with 4-standard-
// error slack: estimate deviations at each probe, the sum drift at each
// probe, and the terminal mean-square error against the limiting bound.
DominanceVerdict compare_to_bounds(const McSummary& summary, const BoundSet& bounds);

}  // namespace dpnash
