#pragma once

#include <Eigen/Dense>

#include "dpnash/errors.hpp"

namespace dpnash {

// Axis-aligned box of joint action profiles.
struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static Box spanning(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

  // Scales every half-width by `width_factor` about the box center, then
  // floors each half-width at `min_half_width` so degenerate coordinates
  // still yield a usable box.
  Box inflated(double width_factor, double min_half_width = 0.0) const;

  void expand_to(const Eigen::VectorXd& point);
  bool contains(const Eigen::VectorXd& point, double tol = 0.0) const;
  void validate() const;
};

// Constants certified over a box: the strong-monotonicity modulus of the
// pseudo-gradient, per-player Lipschitz constants of the own-gradient maps,
// and a bound on |d f_i / d x_i| over the box.
struct GameConstants {
  double strong_monotonicity = 0.0;
  Eigen::VectorXd lipschitz;
  double gradient_bound = 0.0;
  Box bound_box;

  double max_lipschitz() const { return lipschitz.maxCoeff(); }
};

// Scalar-action game whose costs couple through the average action.  Players
// hold a private cost and see only gossiped estimates of the average, so the
// own-action derivative comes in two flavors: exact (true joint action known)
// and estimated (average replaced by the player's local estimate).
class AggregativeGame {
public:
  virtual ~AggregativeGame() = default;

  virtual int players() const = 0;
  virtual double cost(int player, const Eigen::VectorXd& actions) const = 0;
  virtual double partial_gradient(int player, const Eigen::VectorXd& actions) const = 0;
  virtual double partial_gradient_estimated(int player, double action,
                                            double average_estimate) const = 0;
};

// f_i(x) = (x_i - target_i)^2 + (slope * sum_j x_j + offset) * x_i
class QuadraticAggregativeGame final : public AggregativeGame {
public:
  QuadraticAggregativeGame(Eigen::VectorXd targets, double slope, double offset);

  int players() const override { return static_cast<int>(targets_.size()); }
  double cost(int player, const Eigen::VectorXd& actions) const override;
  double partial_gradient(int player, const Eigen::VectorXd& actions) const override;
  double partial_gradient_estimated(int player, double action,
                                    double average_estimate) const override;

  const Eigen::VectorXd& targets() const { return targets_; }
  double slope() const { return slope_; }
  double offset() const { return offset_; }

  // Jacobian of the stacked own-gradients: (2 + slope) I + slope 11^T.
  Eigen::MatrixXd pseudo_gradient_jacobian() const;
  // Constant part of the stacked own-gradients: -2 target_i + offset.
  Eigen::VectorXd pseudo_gradient_offsets() const;

  // Unique equilibrium, solved from the stationarity system; the stacked
  // gradient residual at the result is certified below 1e-9.
  Eigen::VectorXd solve_nash() const;

  // Box spanned by x0 and the equilibrium, half-widths inflated 1.5x with a
  // 0.5 floor.
  Box default_bound_box(const Eigen::VectorXd& x0) const;

private:
  void check_player(int player) const;
  void check_actions(const Eigen::VectorXd& actions) const;

  Eigen::VectorXd targets_;
  double slope_;
  double offset_;
};

// Certifies (m, l_i, C) for the quadratic family over a box that must contain
// the equilibrium.  The gradients are affine, so the bound C is exact: each
// row attains its extrema at box corners selected by coefficient signs.
GameConstants estimate_constants(const QuadraticAggregativeGame& game, const Box& box);

}  // namespace dpnash
