#include <doctest.h>

#include <cmath>
#include <limits>

#include "dpnash/bounds.hpp"
#include "dpnash/privacy.hpp"

using namespace dpnash;

namespace {

// Inputs of the five-player energy game: certified constants over the default
// box, the standard parameters, and the cycle topology's contraction factor.
BoundInputs energy_inputs() {
  Eigen::VectorXd t(5);
  t << 50, 55, 60, 65, 70;
  const QuadraticAggregativeGame game(t, 0.04, 5.0);

  BoundInputs in;
  in.constants = estimate_constants(game, game.default_bound_box(t));
  in.players = 5;
  in.c = 1.0;
  in.q = 0.9;
  in.d = 1.0;
  in.q_bar = 0.99;
  in.initial_estimate_bound = 70.0;
  in.initial_distance = 19.368427312820252;
  in.gamma = 0.7;
  return in;
}

BoundInputs energy_inputs_tv() {
  BoundInputs in = energy_inputs();
  in.gamma.reset();
  in.theta = 1.0040120320801924;
  in.beta = 0.9989994994993742;
  return in;
}

}  // namespace

TEST_CASE("fixed-topology limiting report matches its closed forms") {
  const BoundReport r = mse_bound(energy_inputs());

  CHECK(r.initial_error_term == doctest::Approx(5.183000913183247e-07).epsilon(1e-9));
  CHECK(r.stepsize_term == doctest::Approx(16120.065789473725).epsilon(1e-9));
  CHECK(r.estimation_lag_term == doctest::Approx(9653688.850662498).epsilon(1e-9));
  CHECK(r.noise_term == doctest::Approx(738265.4329879925).epsilon(1e-9));
  CHECK(r.mse_limit == doctest::Approx(10408074.349440482).epsilon(1e-9));
  CHECK(r.mse_limit == doctest::Approx(r.initial_error_term + r.stepsize_term +
                                       r.estimation_lag_term + r.noise_term)
                           .epsilon(1e-12));
  CHECK(r.epsilon == doctest::Approx(544.5).epsilon(1e-9));
  CHECK(r.noise_scale == 1.0);
  CHECK_FALSE(r.time_varying);
}

TEST_CASE("switching-topology limiting report matches its closed forms") {
  const BoundReport r = mse_bound_tv(energy_inputs_tv());

  CHECK(r.initial_error_term == doctest::Approx(5.183000913183247e-07).epsilon(1e-9));
  CHECK(r.stepsize_term == doctest::Approx(16120.065789473725).epsilon(1e-9));
  CHECK(r.estimation_lag_term == doctest::Approx(79474139.71538846).epsilon(1e-9));
  CHECK(r.noise_term == doctest::Approx(3941456.6380717857).epsilon(1e-9));
  CHECK(r.mse_limit == doctest::Approx(83431716.41925025).epsilon(1e-9));
  CHECK(r.time_varying);
}

TEST_CASE("estimation error bound follows its closed-form curve") {
  const BoundInputs in = energy_inputs();
  CHECK(estimation_error_bound(in, 1) == doctest::Approx(267.36041747977504).epsilon(1e-9));
  CHECK(estimation_error_bound(in, 5) == doctest::Approx(240.7764073155501).epsilon(1e-9));
  CHECK(estimation_error_bound(in, 20) == doctest::Approx(78.93931959681697).epsilon(1e-9));
  CHECK(estimation_error_bound(in, 175) == doctest::Approx(84.26253567458043).epsilon(1e-9));
  CHECK_THROWS_AS(estimation_error_bound(in, 0), ValidationError);

  const BoundInputs tv = energy_inputs_tv();
  CHECK(estimation_error_bound_tv(tv, 1) == doctest::Approx(769.5026523142925).epsilon(1e-9));
  CHECK(estimation_error_bound_tv(tv, 175) == doctest::Approx(2834.795904820782).epsilon(1e-9));
  CHECK_THROWS_AS(estimation_error_bound_tv(tv, 0), ValidationError);
}

TEST_CASE("sum-drift bound") {
  CHECK(consensus_drift_bound(5, 1.0, 0.99, 0) == 0.0);
  CHECK(consensus_drift_bound(5, 0.0, 0.99, 1000) == 0.0);
  // 5 * (1 - 0.99^10) / 0.01
  CHECK(consensus_drift_bound(5, 1.0, 0.99, 10) ==
        doctest::Approx(47.80896249559776).epsilon(1e-12));
  // Saturates at N d / (1 - q_bar).
  CHECK(consensus_drift_bound(5, 1.0, 0.99, 5000) ==
        doctest::Approx(500.0).epsilon(1e-9));
}

TEST_CASE("no noise means no noise term and an unbounded budget") {
  BoundInputs in = energy_inputs();
  in.d = 0.0;
  const BoundReport r = mse_bound(in);
  CHECK(r.noise_term == 0.0);
  CHECK(std::isinf(r.epsilon));
  CHECK(r.mse_limit < 10408074.349440482);
}

TEST_CASE("coinciding decay rates evaluate the continuous limit") {
  // gamma == q_bar makes the naive divided difference 0/0; the bound must
  // come out finite and continuous in gamma.
  BoundInputs in = energy_inputs();
  in.gamma = 0.99;
  const double at = estimation_error_bound(in, 20);
  CHECK(std::isfinite(at));
  CHECK(at > 0.0);

  in.gamma = 0.99 - 1e-7;
  const double near = estimation_error_bound(in, 20);
  CHECK(at == doctest::Approx(near).epsilon(2e-3));

  // Same through gamma == q.
  in.gamma = 0.9;
  const double at_q = estimation_error_bound(in, 12);
  in.gamma = 0.9 + 2e-9;
  const double near_q = estimation_error_bound(in, 12);
  CHECK(at_q == doctest::Approx(near_q).epsilon(1e-6));
}

TEST_CASE("budget-parameterized bound agrees with the noise-parameterized one") {
  const BoundInputs in = energy_inputs();
  for (int i = 0; i < 100; ++i) {
    const double eps = 1.0 * std::pow(1.12, i);  // spans ~1 to ~8e4
    const BoundReport via_eps = mse_bound_for_epsilon(in, eps);
    BoundInputs with_d = in;
    with_d.d = scale_for_epsilon(in.c, in.q, in.q_bar,
                                 in.constants.gradient_bound, eps);
    const BoundReport via_d = mse_bound(with_d);
    CHECK(via_eps.mse_limit == doctest::Approx(via_d.mse_limit).epsilon(1e-12));
    CHECK(via_eps.noise_scale == doctest::Approx(with_d.d).epsilon(1e-12));
  }
}

TEST_CASE("tuning returns the grid argmin") {
  const BoundInputs base = energy_inputs();
  TuneGrid grid;
  grid.c_lo = 0.5;
  grid.c_hi = 2.0;
  grid.c_points = 3;
  grid.q_lo = 0.8;
  grid.q_hi = 0.9;
  grid.q_points = 2;
  const double eps = 544.5;
  const TuneResult best = tune_parameters(base, eps, grid, 0.99);

  // Brute-force the same six candidates.
  double expect = std::numeric_limits<double>::infinity();
  double expect_c = 0.0, expect_q = 0.0;
  for (double c : {0.5, 1.0, 2.0}) {
    for (double q : {0.8, 0.9}) {
      BoundInputs in = base;
      in.c = c;
      in.q = q;
      in.q_bar = 0.99;
      const double v = mse_bound_for_epsilon(in, eps).mse_limit;
      if (v < expect) {
        expect = v;
        expect_c = c;
        expect_q = q;
      }
    }
  }
  CHECK(best.c == doctest::Approx(expect_c).epsilon(1e-12));
  CHECK(best.q == doctest::Approx(expect_q).epsilon(1e-12));
  CHECK(best.report.mse_limit == doctest::Approx(expect).epsilon(1e-12));

  // A larger search can only improve the objective.
  const TuneResult wide = tune_parameters(base, eps, {}, 0.999);
  CHECK(wide.report.mse_limit <= best.report.mse_limit * (1 + 1e-12));
}

TEST_CASE("tuning validates its grid") {
  const BoundInputs base = energy_inputs();
  TuneGrid grid;
  grid.q_hi = 0.999;  // collides with q_bar
  CHECK_THROWS_AS(tune_parameters(base, 10.0, grid, 0.99), ValidationError);
  CHECK_THROWS_AS(tune_parameters(base, -1.0, {}, 0.999), ValidationError);

  TuneGrid degenerate;
  degenerate.c_points = 0;
  CHECK_THROWS_AS(tune_parameters(base, 10.0, degenerate, 0.999), ValidationError);
}

TEST_CASE("input validation") {
  BoundInputs in = energy_inputs();
  in.players = 1;
  CHECK_THROWS_AS(in.validate(), ValidationError);

  in = energy_inputs();
  in.c = 0.0;
  CHECK_THROWS_AS(in.validate(), ValidationError);

  in = energy_inputs();
  in.q = 1.0;
  CHECK_THROWS_AS(in.validate(), ValidationError);

  in = energy_inputs();
  in.d = -0.5;
  CHECK_THROWS_AS(in.validate(), ValidationError);

  in = energy_inputs();
  in.gamma.reset();  // neither gamma nor (theta, beta)
  CHECK_THROWS_AS(mse_bound(in), ValidationError);

  in = energy_inputs();  // fixed inputs passed to the switching bound
  CHECK_THROWS_AS(mse_bound_tv(in), ValidationError);

  CHECK_THROWS_AS(mse_bound_for_epsilon(energy_inputs(), 0.0), ValidationError);
}
