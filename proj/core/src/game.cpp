#include "dpnash/game.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dpnash {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

}  // namespace

Box Box::spanning(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  require(a.size() == b.size(), "box corners must have equal dimension");
  Box box;
  box.lower = a.cwiseMin(b);
  box.upper = a.cwiseMax(b);
  return box;
}

Box Box::inflated(double width_factor, double min_half_width) const {
  validate();
  require(width_factor > 0.0, "box inflation factor must be positive");
  const Eigen::VectorXd center = 0.5 * (lower + upper);
  Eigen::VectorXd half = 0.5 * (upper - lower) * width_factor;
  half = half.cwiseMax(min_half_width);
  Box box;
  box.lower = center - half;
  box.upper = center + half;
  return box;
}

void Box::expand_to(const Eigen::VectorXd& point) {
  validate();
  require(point.size() == lower.size(), "point dimension does not match box");
  lower = lower.cwiseMin(point);
  upper = upper.cwiseMax(point);
}

bool Box::contains(const Eigen::VectorXd& point, double tol) const {
  if (point.size() != lower.size()) return false;
  return ((point.array() >= lower.array() - tol) &&
          (point.array() <= upper.array() + tol))
      .all();
}

void Box::validate() const {
  require(lower.size() > 0 && lower.size() == upper.size(),
          "box must have matching nonempty lower/upper vectors");
  require(lower.allFinite() && upper.allFinite(), "box bounds must be finite");
  require((lower.array() <= upper.array()).all(),
          "box lower bound exceeds upper bound");
}

QuadraticAggregativeGame::QuadraticAggregativeGame(Eigen::VectorXd targets,
                                                   double slope, double offset)
    : targets_(std::move(targets)), slope_(slope), offset_(offset) {
  require(targets_.size() >= 2, "game needs at least 2 players");
  require(targets_.allFinite(), "targets must be finite");
  require(std::isfinite(slope_) && std::isfinite(offset_),
          "pricing coefficients must be finite");
  const Eigen::MatrixXd jac = pseudo_gradient_jacobian();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      0.5 * (jac + jac.transpose()));
  require(eig.info() == Eigen::Success && eig.eigenvalues().minCoeff() > 0.0,
          "pseudo-gradient is not strongly monotone for these coefficients");
}

void QuadraticAggregativeGame::check_player(int player) const {
  if (player < 0 || player >= players())
    throw ValidationError("player index " + std::to_string(player) +
                          " out of range [0, " + std::to_string(players()) + ")");
}

void QuadraticAggregativeGame::check_actions(const Eigen::VectorXd& actions) const {
  if (actions.size() != targets_.size())
    throw ValidationError("action profile has dimension " +
                          std::to_string(actions.size()) + ", expected " +
                          std::to_string(targets_.size()));
}

double QuadraticAggregativeGame::cost(int player, const Eigen::VectorXd& actions) const {
  check_player(player);
  check_actions(actions);
  const double own = actions[player];
  const double dev = own - targets_[player];
  return dev * dev + (slope_ * actions.sum() + offset_) * own;
}

double QuadraticAggregativeGame::partial_gradient(int player,
                                                  const Eigen::VectorXd& actions) const {
  check_player(player);
  check_actions(actions);
  const double own = actions[player];
  return 2.0 * (own - targets_[player]) + slope_ * actions.sum() + slope_ * own +
         offset_;
}

double QuadraticAggregativeGame::partial_gradient_estimated(int player, double action,
                                                            double average_estimate) const {
  check_player(player);
  const double n = static_cast<double>(players());
  return 2.0 * (action - targets_[player]) + n * slope_ * average_estimate +
         offset_ + slope_ * action;
}

Eigen::MatrixXd QuadraticAggregativeGame::pseudo_gradient_jacobian() const {
  const int n = players();
  Eigen::MatrixXd jac = Eigen::MatrixXd::Constant(n, n, slope_);
  jac.diagonal().array() += 2.0 + slope_;
  return jac;
}

Eigen::VectorXd QuadraticAggregativeGame::pseudo_gradient_offsets() const {
  return (-2.0 * targets_).array() + offset_;
}

Eigen::VectorXd QuadraticAggregativeGame::solve_nash() const {
  const Eigen::MatrixXd jac = pseudo_gradient_jacobian();
  const Eigen::VectorXd rhs = -pseudo_gradient_offsets();
  const Eigen::LDLT<Eigen::MatrixXd> solver(jac);
  require(solver.info() == Eigen::Success, "stationarity system is not solvable");
  const Eigen::VectorXd x = solver.solve(rhs);
  const double residual = (jac * x - rhs).cwiseAbs().maxCoeff();
  require(residual < 1e-9, "equilibrium residual " + std::to_string(residual) +
                               " exceeds 1e-9");
  return x;
}

Box QuadraticAggregativeGame::default_bound_box(const Eigen::VectorXd& x0) const {
  check_actions(x0);
  require(x0.allFinite(), "x0 must be finite");
  return Box::spanning(x0, solve_nash()).inflated(1.5, 0.5);
}

GameConstants estimate_constants(const QuadraticAggregativeGame& game, const Box& box) {
  box.validate();
  const int n = game.players();
  require(box.lower.size() == n, "box dimension does not match player count");
  require((box.upper.array() > box.lower.array()).all(), "degenerate box");
  const Eigen::VectorXd nash = game.solve_nash();
  require(box.contains(nash, 1e-9), "box does not contain the equilibrium");

  const Eigen::MatrixXd jac = game.pseudo_gradient_jacobian();
  const Eigen::VectorXd offsets = game.pseudo_gradient_offsets();

  GameConstants constants;
  constants.bound_box = box;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      0.5 * (jac + jac.transpose()));
  constants.strong_monotonicity = eig.eigenvalues().minCoeff();
  constants.lipschitz = jac.rowwise().norm();

  double bound = 0.0;
  for (int i = 0; i < n; ++i) {
    double hi = offsets[i];
    double lo = offsets[i];
    for (int j = 0; j < n; ++j) {
      const double w = jac(i, j);
      hi += w * (w >= 0.0 ? box.upper[j] : box.lower[j]);
      lo += w * (w >= 0.0 ? box.lower[j] : box.upper[j]);
    }
    bound = std::max({bound, std::abs(hi), std::abs(lo)});
  }
  constants.gradient_bound = bound;
  return constants;
}

}  // namespace dpnash
