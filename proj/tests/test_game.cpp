#include <doctest.h>

#include "dpnash/game.hpp"

using namespace dpnash;

namespace {

Eigen::VectorXd energy_targets() {
  Eigen::VectorXd t(5);
  t << 50, 55, 60, 65, 70;
  return t;
}

QuadraticAggregativeGame energy_game() {
  return QuadraticAggregativeGame(energy_targets(), 0.04, 5.0);
}

}  // namespace

TEST_CASE("cost and gradients match hand-computed values") {
  const QuadraticAggregativeGame g = energy_game();
  const Eigen::VectorXd t = energy_targets();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(5);

  // f_1 at the target profile: 0^2 + (0.04*300 + 5)*50
  CHECK(g.cost(0, t) == doctest::Approx(850.0).epsilon(1e-14));
  // f_1 at zero: (0-50)^2 + 5*0
  CHECK(g.cost(0, zero) == doctest::Approx(2500.0).epsilon(1e-14));

  // df_1/dx_1 at t: 2*0 + (0.04*300 + 5) + 0.04*50
  CHECK(g.partial_gradient(0, t) == doctest::Approx(19.0).epsilon(1e-14));
  // df_3/dx_3 at zero: 2*(0-60) + 5
  CHECK(g.partial_gradient(2, zero) == doctest::Approx(-115.0).epsilon(1e-14));

  // Estimated flavor replaces the average with the local estimate:
  // 2(x_i - t_i) + N*slope*y + offset + slope*x_i
  CHECK(g.partial_gradient_estimated(0, 50.0, 1.0) ==
        doctest::Approx(7.2).epsilon(1e-14));
  CHECK(g.partial_gradient_estimated(0, 50.0, 50.0) ==
        doctest::Approx(17.0).epsilon(1e-14));
}

TEST_CASE("estimated gradient agrees with the exact one at a truthful estimate") {
  const QuadraticAggregativeGame g = energy_game();
  Eigen::VectorXd x(5);
  x << 12.5, -3.0, 40.0, 7.25, 19.0;
  for (int i = 0; i < 5; ++i)
    CHECK(g.partial_gradient(i, x) ==
          doctest::Approx(g.partial_gradient_estimated(i, x[i], x.mean()))
              .epsilon(1e-13));
}

TEST_CASE("partial gradient is the derivative of the cost") {
  const QuadraticAggregativeGame g = energy_game();
  Eigen::VectorXd x(5);
  x << 47.0, 52.5, 61.0, 63.0, 71.5;
  const double h = 1e-5;
  for (int i = 0; i < 5; ++i) {
    Eigen::VectorXd up = x, dn = x;
    up[i] += h;
    dn[i] -= h;
    const double fd = (g.cost(i, up) - g.cost(i, dn)) / (2 * h);
    CHECK(g.partial_gradient(i, x) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("equilibrium solve reproduces the known energy-game equilibrium") {
  const QuadraticAggregativeGame g = energy_game();
  const Eigen::VectorXd xstar = g.solve_nash();

  Eigen::VectorXd expected(5);
  expected << 41.535364145658264, 46.43732492997199, 51.33928571428571,
      56.24124649859943, 61.14320728291317;
  for (int i = 0; i < 5; ++i)
    CHECK(xstar[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  CHECK(xstar.sum() == doctest::Approx(256.69642857142856).epsilon(1e-14));

  // Stationarity: every exact partial vanishes at the equilibrium.
  for (int i = 0; i < 5; ++i)
    CHECK(std::abs(g.partial_gradient(i, xstar)) < 1e-9);
}

TEST_CASE("jacobian and offsets describe the stacked gradient exactly") {
  const QuadraticAggregativeGame g = energy_game();
  const Eigen::MatrixXd M = g.pseudo_gradient_jacobian();
  const Eigen::VectorXd b = g.pseudo_gradient_offsets();
  Eigen::VectorXd x(5);
  x << 3.0, -8.0, 12.0, 0.5, 99.0;
  for (int i = 0; i < 5; ++i)
    CHECK(g.partial_gradient(i, x) ==
          doctest::Approx(M.row(i).dot(x) + b[i]).epsilon(1e-13));
}

TEST_CASE("constants certified over the default box match the closed forms") {
  const QuadraticAggregativeGame g = energy_game();
  const Box box = g.default_bound_box(energy_targets());
  const GameConstants gc = estimate_constants(g, box);

  CHECK(gc.strong_monotonicity == doctest::Approx(2.04).epsilon(1e-12));
  // Row norm of (2 + s) I + s 11^T: sqrt(2.08^2 + 4 * 0.04^2)
  for (int i = 0; i < 5; ++i)
    CHECK(gc.lipschitz[i] ==
          doctest::Approx(2.0815378930012304).epsilon(1e-12));
  CHECK(gc.max_lipschitz() == doctest::Approx(2.0815378930012304).epsilon(1e-12));
  // Gradient rows are affine, so the box bound is attained at a corner.
  CHECK(gc.gradient_bound == doctest::Approx(24.75).epsilon(1e-12));
}

TEST_CASE("box algebra") {
  Eigen::VectorXd a(2), b(2);
  a << 0.0, 4.0;
  b << 2.0, 2.0;
  Box box = Box::spanning(a, b);
  CHECK(box.lower[0] == 0.0);
  CHECK(box.lower[1] == 2.0);
  CHECK(box.upper[0] == 2.0);
  CHECK(box.upper[1] == 4.0);

  const Box wide = box.inflated(1.5, 0.5);
  CHECK(wide.lower[0] == doctest::Approx(-0.5));
  CHECK(wide.upper[0] == doctest::Approx(2.5));

  // Degenerate coordinate picks up the half-width floor.
  Eigen::VectorXd p(2);
  p << 1.0, 1.0;
  const Box deg = Box::spanning(p, p).inflated(1.5, 0.5);
  CHECK(deg.lower[0] == doctest::Approx(0.5));
  CHECK(deg.upper[0] == doctest::Approx(1.5));

  CHECK(box.contains(a));
  Eigen::VectorXd outside(2);
  outside << 3.0, 3.0;
  CHECK_FALSE(box.contains(outside));
  box.expand_to(outside);
  CHECK(box.contains(outside));

  Box bad;
  bad.lower = a;
  bad.upper = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("construction rejects degenerate games") {
  Eigen::VectorXd t1(1);
  t1 << 5.0;
  CHECK_THROWS_AS(QuadraticAggregativeGame(t1, 0.04, 5.0), ValidationError);

  Eigen::VectorXd bad = energy_targets();
  bad[2] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(QuadraticAggregativeGame(bad, 0.04, 5.0), ValidationError);

  // slope <= -1/3 makes the pseudo-gradient lose strong monotonicity.
  CHECK_THROWS_AS(QuadraticAggregativeGame(energy_targets(), -0.4, 5.0),
                  ValidationError);
  CHECK_NOTHROW(QuadraticAggregativeGame(energy_targets(), -0.3, 5.0));
}

TEST_CASE("constant certification rejects boxes that miss the equilibrium") {
  const QuadraticAggregativeGame g = energy_game();
  Box box;
  box.lower = Eigen::VectorXd::Zero(5);
  box.upper = Eigen::VectorXd::Ones(5);
  CHECK_THROWS_AS(estimate_constants(g, box), ValidationError);
}

TEST_CASE("default box covers start and equilibrium") {
  const QuadraticAggregativeGame g = energy_game();
  const Eigen::VectorXd x0 = energy_targets();
  const Box box = g.default_bound_box(x0);
  CHECK(box.contains(x0));
  CHECK(box.contains(g.solve_nash()));
}

TEST_CASE("player and dimension arguments are checked") {
  const QuadraticAggregativeGame g = energy_game();
  const Eigen::VectorXd t = energy_targets();
  CHECK_THROWS_AS(g.cost(5, t), ValidationError);
  CHECK_THROWS_AS(g.cost(-1, t), ValidationError);
  CHECK_THROWS_AS(g.partial_gradient(0, Eigen::VectorXd::Zero(4)),
                  ValidationError);
}
