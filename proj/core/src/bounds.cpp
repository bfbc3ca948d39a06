#include "dpnash/bounds.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "dpnash/privacy.hpp"

namespace dpnash {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

// (a^k - b^k) / (a - b), evaluated as the continuous limit k a^{k-1} when the
// rates nearly coincide.
double geometric_gap(double a, double b, long k) {
  if (std::abs(a - b) < 1e-9)
    return static_cast<double>(k) * std::pow(a, static_cast<double>(k - 1));
  return (std::pow(a, static_cast<double>(k)) - std::pow(b, static_cast<double>(k))) /
         (a - b);
}

void check_rate_inputs(const BoundInputs& in) {
  in.validate();
  require(in.q_bar > in.q, "q_bar must exceed q");
}

double epsilon_or_inf(const BoundInputs& in) {
  if (in.d == 0.0) return std::numeric_limits<double>::infinity();
  return epsilon_of(in.c, in.q, in.d, in.q_bar, in.constants.gradient_bound);
}

}  // namespace

void BoundInputs::validate() const {
  require(players >= 2, "player count must be >= 2");
  require(c > 0.0, "stepsize scale c must be positive");
  require(q > 0.0 && q < 1.0, "stepsize decay q must lie in (0, 1)");
  require(d >= 0.0, "noise scale d must be >= 0");
  require(q_bar > 0.0 && q_bar < 1.0, "noise decay q_bar must lie in (0, 1)");
  require(initial_estimate_bound >= 0.0 && initial_distance >= 0.0,
          "initial magnitudes must be nonnegative");
  require(constants.strong_monotonicity > 0.0,
          "strong monotonicity modulus must be positive");
  require(constants.lipschitz.size() > 0, "per-player Lipschitz constants missing");
  require(constants.gradient_bound > 0.0, "gradient bound C must be positive");
  if (gamma) require(*gamma > 0.0 && *gamma < 1.0, "gamma must lie in (0, 1)");
  if (theta || beta) {
    require(theta && beta, "switching inputs need both theta and beta");
    require(*theta >= 1.0, "theta must be >= 1");
    require(*beta > 0.0 && *beta < 1.0, "beta must lie in (0, 1)");
  }
}

double consensus_drift_bound(int players, double d, double q_bar, long k) {
  require(players >= 2, "player count must be >= 2");
  require(d >= 0.0, "noise scale d must be >= 0");
  require(q_bar > 0.0 && q_bar < 1.0, "noise decay q_bar must lie in (0, 1)");
  require(k >= 0, "iteration must be nonnegative");
  return static_cast<double>(players) * d *
         (1.0 - std::pow(q_bar, static_cast<double>(k))) / (1.0 - q_bar);
}

double estimation_error_bound(const BoundInputs& in, long k) {
  check_rate_inputs(in);
  require(in.gamma.has_value(), "fixed-topology bound needs gamma");
  require(k >= 1, "estimation error bound is defined for k >= 1");
  const double n = static_cast<double>(in.players);
  const double sn = std::sqrt(n);
  const double g = *in.gamma;
  const double C = in.constants.gradient_bound;
  const double t1 = (2.0 * sn * (n - 1.0) * in.initial_estimate_bound / n) *
                    std::pow(g, static_cast<double>(k));
  const double t2 =
      (2.0 * (n - 1.0) * sn * in.d * g / n) * geometric_gap(g, in.q_bar, k);
  const double t3 = (2.0 * (n - 1.0) * sn * C * in.c / n) * geometric_gap(g, in.q, k);
  const double t4 =
      in.d * (1.0 - std::pow(in.q_bar, static_cast<double>(k))) / (1.0 - in.q_bar);
  return t1 + t2 + t3 + t4;
}

double estimation_error_bound_tv(const BoundInputs& in, long k) {
  check_rate_inputs(in);
  require(in.theta.has_value() && in.beta.has_value(),
          "switching bound needs theta and beta");
  require(k >= 1, "estimation error bound is defined for k >= 1");
  const double n = static_cast<double>(in.players);
  const double th = *in.theta;
  const double b = *in.beta;
  const double C = in.constants.gradient_bound;
  const double t1 = 2.0 * (n - 1.0) * th * std::pow(b, static_cast<double>(k)) *
                    in.initial_estimate_bound;
  const double t2 = 2.0 * (n - 1.0) * th * in.d * b * geometric_gap(b, in.q_bar, k);
  const double t3 = 2.0 * th * (n - 1.0) * C * in.c * geometric_gap(b, in.q, k);
  const double t4 =
      in.d * (1.0 - std::pow(in.q_bar, static_cast<double>(k))) / (1.0 - in.q_bar);
  return t1 + t2 + t3 + t4;
}

BoundReport mse_bound(const BoundInputs& in) {
  check_rate_inputs(in);
  require(in.gamma.has_value(), "fixed-topology bound needs gamma");
  const double n = static_cast<double>(in.players);
  const double sn = std::sqrt(n);
  const double g = *in.gamma;
  const double C = in.constants.gradient_bound;
  const double m = in.constants.strong_monotonicity;
  const double lmax = in.constants.max_lipschitz();
  const double C1 = in.initial_estimate_bound;
  const double C2 = in.initial_distance;
  const double reach = C2 + in.c * C * sn / (1.0 - in.q);

  BoundReport rep;
  rep.initial_error_term = C2 * C2 * std::exp(-m * in.c / (1.0 - in.q));
  rep.stepsize_term = in.c * in.c * n * C * C / (1.0 - in.q * in.q);
  rep.estimation_lag_term =
      4.0 * lmax * (n - 1.0) * reach *
      (C1 * in.c / (1.0 - in.q * g) +
       C * in.c * in.c * in.q / ((1.0 - in.q * g) * (1.0 - in.q * in.q)));
  rep.noise_term = 2.0 * lmax * reach * in.d * in.c * in.q *
                   (2.0 * (n - 1.0) * g / ((1.0 - in.q * g) * (1.0 - in.q_bar * in.q)) +
                    sn / ((1.0 - in.q) * (1.0 - in.q_bar * in.q)));
  rep.mse_limit = rep.initial_error_term + rep.stepsize_term +
                  rep.estimation_lag_term + rep.noise_term;
  rep.noise_scale = in.d;
  rep.epsilon = epsilon_or_inf(in);
  rep.time_varying = false;
  return rep;
}

BoundReport mse_bound_tv(const BoundInputs& in) {
  check_rate_inputs(in);
  require(in.theta.has_value() && in.beta.has_value(),
          "switching bound needs theta and beta");
  const double n = static_cast<double>(in.players);
  const double sn = std::sqrt(n);
  const double th = *in.theta;
  const double b = *in.beta;
  const double C = in.constants.gradient_bound;
  const double m = in.constants.strong_monotonicity;
  const double lmax = in.constants.max_lipschitz();
  const double C1 = in.initial_estimate_bound;
  const double C2 = in.initial_distance;
  const double reach = C2 + in.c * C * sn / (1.0 - in.q);

  BoundReport rep;
  rep.initial_error_term = C2 * C2 * std::exp(-m * in.c / (1.0 - in.q));
  rep.stepsize_term = in.c * in.c * n * C * C / (1.0 - in.q * in.q);
  rep.estimation_lag_term =
      4.0 * (n - 1.0) * sn * th * lmax * reach *
      (C1 * in.c / (1.0 - in.q * b) +
       C * in.c * in.c * in.q / ((1.0 - b * in.q) * (1.0 - in.q * in.q)));
  rep.noise_term =
      2.0 * lmax * reach * sn * in.d * in.c * in.q *
      (2.0 * (n - 1.0) * th * b / ((1.0 - in.q * b) * (1.0 - in.q_bar * in.q)) +
       1.0 / ((1.0 - in.q) * (1.0 - in.q_bar * in.q)));
  rep.mse_limit = rep.initial_error_term + rep.stepsize_term +
                  rep.estimation_lag_term + rep.noise_term;
  rep.noise_scale = in.d;
  rep.epsilon = epsilon_or_inf(in);
  rep.time_varying = true;
  return rep;
}

BoundReport mse_bound_for_epsilon(const BoundInputs& in, double epsilon) {
  check_rate_inputs(in);
  require(in.gamma.has_value(), "fixed-topology bound needs gamma");
  require(epsilon > 0.0, "budget must be positive");
  const double n = static_cast<double>(in.players);
  const double sn = std::sqrt(n);
  const double g = *in.gamma;
  const double C = in.constants.gradient_bound;
  const double m = in.constants.strong_monotonicity;
  const double lmax = in.constants.max_lipschitz();
  const double C2 = in.initial_distance;
  const double reach = C2 + in.c * C * sn / (1.0 - in.q);

  BoundReport rep;
  rep.initial_error_term = C2 * C2 * std::exp(-m * in.c / (1.0 - in.q));
  rep.stepsize_term = in.c * in.c * n * C * C / (1.0 - in.q * in.q);
  {
    BoundInputs lag = in;
    lag.d = 0.0;
    rep.estimation_lag_term = mse_bound(lag).estimation_lag_term;
  }
  rep.noise_term = 2.0 * lmax * reach *
                   (2.0 * C * in.c * in.c * in.q * in.q_bar /
                    (epsilon * (in.q_bar - in.q))) *
                   (2.0 * (n - 1.0) * g / ((1.0 - in.q * g) * (1.0 - in.q_bar * in.q)) +
                    sn / ((1.0 - in.q) * (1.0 - in.q_bar * in.q)));
  rep.mse_limit = rep.initial_error_term + rep.stepsize_term +
                  rep.estimation_lag_term + rep.noise_term;
  rep.noise_scale =
      scale_for_epsilon(in.c, in.q, in.q_bar, in.constants.gradient_bound, epsilon);
  rep.epsilon = epsilon;
  rep.time_varying = false;
  return rep;
}

TuneResult tune_parameters(const BoundInputs& base, double epsilon,
                           const TuneGrid& grid, double q_bar) {
  require(epsilon > 0.0, "budget must be positive");
  require(grid.c_points >= 1 && grid.q_points >= 1, "grid needs at least one point");
  require(grid.c_lo > 0.0 && grid.c_lo <= grid.c_hi, "need 0 < c_lo <= c_hi");
  require(grid.q_lo > 0.0 && grid.q_lo <= grid.q_hi, "need 0 < q_lo <= q_hi");
  require(grid.q_hi < q_bar, "grid q values must stay below q_bar");
  require(q_bar < 1.0, "q_bar must lie below 1");
  require(grid.c_points == 1 || grid.c_lo < grid.c_hi,
          "multi-point c grid needs c_lo < c_hi");
  require(grid.q_points == 1 || grid.q_lo < grid.q_hi,
          "multi-point q grid needs q_lo < q_hi");

  BoundInputs in = base;
  in.q_bar = q_bar;

  TuneResult best;
  bool found = false;
  const double log_lo = std::log(grid.c_lo);
  const double log_hi = std::log(grid.c_hi);
  for (int ci = 0; ci < grid.c_points; ++ci) {
    const double tc = grid.c_points == 1
                          ? 0.0
                          : static_cast<double>(ci) / (grid.c_points - 1);
    in.c = std::exp(log_lo + tc * (log_hi - log_lo));
    for (int qi = 0; qi < grid.q_points; ++qi) {
      const double tq = grid.q_points == 1
                            ? 0.0
                            : static_cast<double>(qi) / (grid.q_points - 1);
      in.q = grid.q_lo + tq * (grid.q_hi - grid.q_lo);
      const BoundReport rep = mse_bound_for_epsilon(in, epsilon);
      if (!found || rep.mse_limit < best.report.mse_limit) {
        best = {in.c, in.q, rep};
        found = true;
      }
    }
  }
  require(found, "empty tuning grid");
  return best;
}

}  // namespace dpnash
