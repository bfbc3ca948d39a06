#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dpnash/errors.hpp"

namespace dpnash {

struct TopologyOptions {
  // Sinkhorn-rescale near-stochastic inputs instead of rejecting them.
  bool renormalize = false;
  // Tolerance on row/column sums.
  double tol = 1e-12;
};

// Fixed gossip weight matrix.  Construction certifies: square of size >= 2,
// nonnegative, doubly stochastic within tol, positive diagonal, symmetric
// sparsity pattern (bidirectional links), connected graph, and a contraction
// factor gamma < 1 toward the uniform average.
class Topology {
public:
  static Topology validate(Eigen::MatrixXd weights, TopologyOptions opts = {});

  int size() const { return static_cast<int>(weights_.rows()); }
  const Eigen::MatrixXd& weights() const { return weights_; }

  // Spectral radius of A - (1/N) 11^T.  For symmetric weights this equals the
  // spectral norm, so ||A^k - (1/N) 11^T||_2 <= gamma^k.
  double gamma() const { return gamma_; }

  // ||A^k - (1/N) 11^T||_2 for k = 0..k_max.
  std::vector<double> contraction_curve(int k_max) const;

private:
  Topology(Eigen::MatrixXd weights, double gamma)
      : weights_(std::move(weights)), gamma_(gamma) {}

  Eigen::MatrixXd weights_;
  double gamma_;
};

// Periodic schedule of gossip matrices.  Each matrix passes the fixed-topology
// certificate except connectivity, which only a window union must provide:
// `window` is the smallest z such that every z consecutive graphs have a
// connected union.  theta and beta bound the transition products:
// |[A(k)...A(s)]_ij - 1/N| <= theta * beta^(k+1-s).
class TopologySchedule {
public:
  static TopologySchedule validate(std::vector<Eigen::MatrixXd> matrices,
                                   TopologyOptions opts = {});

  int size() const { return static_cast<int>(matrices_.front().rows()); }
  int period() const { return static_cast<int>(matrices_.size()); }
  int window() const { return window_; }

  // Smallest positive entry across the schedule.
  double min_weight() const { return min_weight_; }
  double theta() const { return theta_; }
  double beta() const { return beta_; }

  const Eigen::MatrixXd& matrix_at(long k) const;

  // Product A(k) A(k-1) ... A(s) for 0 <= s <= k.
  Eigen::MatrixXd transition_product(long k, long s) const;

private:
  TopologySchedule(std::vector<Eigen::MatrixXd> matrices, int window,
                   double min_weight, double theta, double beta)
      : matrices_(std::move(matrices)),
        window_(window),
        min_weight_(min_weight),
        theta_(theta),
        beta_(beta) {}

  std::vector<Eigen::MatrixXd> matrices_;
  int window_;
  double min_weight_;
  double theta_;
  double beta_;
};

}  // namespace dpnash
