#include "dpnash/topology.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace dpnash {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

void sinkhorn_rescale(Eigen::MatrixXd& w, double tol) {
  for (int iter = 0; iter < 1000; ++iter) {
    const double row_dev = (w.rowwise().sum().array() - 1.0).abs().maxCoeff();
    const double col_dev = (w.colwise().sum().array() - 1.0).abs().maxCoeff();
    if (row_dev <= tol && col_dev <= tol) return;
    for (int i = 0; i < w.rows(); ++i) {
      const double s = w.row(i).sum();
      require(s > 0.0, "renormalization failed: row " + std::to_string(i) +
                           " sums to zero");
      w.row(i) /= s;
    }
    for (int j = 0; j < w.cols(); ++j) {
      const double s = w.col(j).sum();
      require(s > 0.0, "renormalization failed: column " + std::to_string(j) +
                           " sums to zero");
      w.col(j) /= s;
    }
  }
  throw ValidationError("renormalization did not converge to a doubly stochastic matrix");
}

// Certificate shared by fixed matrices and schedule entries; `where` prefixes
// messages so schedule errors name the offending matrix.
void certify_weights(Eigen::MatrixXd& w, const TopologyOptions& opts,
                     const std::string& where) {
  require(w.rows() == w.cols(), where + "weight matrix must be square");
  require(w.rows() >= 2, where + "weight matrix needs size >= 2");
  require(w.allFinite(), where + "weights must be finite");
  require((w.array() >= 0.0).all(), where + "weights must be nonnegative");
  if (opts.renormalize) sinkhorn_rescale(w, opts.tol);
  const int n = static_cast<int>(w.rows());
  for (int i = 0; i < n; ++i) {
    const double rs = w.row(i).sum();
    require(std::abs(rs - 1.0) <= opts.tol,
            where + "row " + std::to_string(i) + " sums to " + std::to_string(rs) +
                ", not 1 (not doubly stochastic)");
    const double cs = w.col(i).sum();
    require(std::abs(cs - 1.0) <= opts.tol,
            where + "column " + std::to_string(i) + " sums to " + std::to_string(cs) +
                ", not 1 (not doubly stochastic)");
    require(w(i, i) > 0.0, where + "player " + std::to_string(i) +
                               " has zero self-weight");
    for (int j = 0; j < n; ++j) {
      require((w(i, j) > 0.0) == (w(j, i) > 0.0),
              where + "sparsity pattern is asymmetric at (" + std::to_string(i) +
                  ", " + std::to_string(j) + "): links must be bidirectional");
    }
  }
}

bool pattern_connected(const Eigen::MatrixXd& pattern) {
  const int n = static_cast<int>(pattern.rows());
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    for (int j = 0; j < n; ++j) {
      if (j != i && !seen[j] && pattern(i, j) > 0.0) {
        seen[j] = 1;
        ++reached;
        stack.push_back(j);
      }
    }
  }
  return reached == n;
}

double spectral_norm(const Eigen::MatrixXd& m) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

double deviation_radius(const Eigen::MatrixXd& w) {
  const int n = static_cast<int>(w.rows());
  const Eigen::MatrixXd dev =
      w - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  if ((w - w.transpose()).cwiseAbs().maxCoeff() <= 1e-12) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dev);
    require(eig.info() == Eigen::Success, "eigensolve failed on weight matrix");
    return eig.eigenvalues().cwiseAbs().maxCoeff();
  }
  const Eigen::EigenSolver<Eigen::MatrixXd> eig(dev);
  require(eig.info() == Eigen::Success, "eigensolve failed on weight matrix");
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

Topology Topology::validate(Eigen::MatrixXd weights, TopologyOptions opts) {
  certify_weights(weights, opts, "");
  require(pattern_connected(weights), "communication graph is disconnected");
  const double gamma = deviation_radius(weights);
  require(gamma < 1.0, "contraction factor " + std::to_string(gamma) +
                           " is not below 1");
  return Topology(std::move(weights), gamma);
}

std::vector<double> Topology::contraction_curve(int k_max) const {
  require(k_max >= 0, "contraction curve horizon must be nonnegative");
  const int n = size();
  const Eigen::MatrixXd avg =
      Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  std::vector<double> curve;
  curve.reserve(static_cast<size_t>(k_max) + 1);
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
  curve.push_back(spectral_norm(power - avg));
  for (int k = 1; k <= k_max; ++k) {
    power = weights_ * power;
    curve.push_back(spectral_norm(power - avg));
  }
  return curve;
}

TopologySchedule TopologySchedule::validate(std::vector<Eigen::MatrixXd> matrices,
                                            TopologyOptions opts) {
  require(!matrices.empty(), "schedule needs at least one matrix");
  const Eigen::Index n = matrices.front().rows();
  for (size_t l = 0; l < matrices.size(); ++l) {
    const std::string where = "schedule matrix " + std::to_string(l) + ": ";
    require(matrices[l].rows() == n && matrices[l].cols() == n,
            where + "size differs from the first matrix");
    certify_weights(matrices[l], opts, where);
  }

  double min_weight = std::numeric_limits<double>::infinity();
  for (const auto& w : matrices)
    for (Eigen::Index i = 0; i < w.size(); ++i)
      if (w(i) > 0.0) min_weight = std::min(min_weight, w(i));

  const int period = static_cast<int>(matrices.size());
  int window = 0;
  for (int z = 1; z <= period && window == 0; ++z) {
    bool all_connected = true;
    for (int s = 0; s < period && all_connected; ++s) {
      Eigen::MatrixXd union_pattern = Eigen::MatrixXd::Zero(n, n);
      for (int l = 0; l < z; ++l) union_pattern += matrices[(s + l) % period];
      all_connected = pattern_connected(union_pattern);
    }
    if (all_connected) window = z;
  }
  require(window > 0,
          "no window of consecutive graphs has a connected union (some player "
          "is permanently isolated)");

  const double nn = static_cast<double>(n);
  const double base = 1.0 - min_weight / (4.0 * nn * nn);
  const double theta = 1.0 / (base * base);
  const double beta = std::pow(base, 1.0 / static_cast<double>(window));
  return TopologySchedule(std::move(matrices), window, min_weight, theta, beta);
}

const Eigen::MatrixXd& TopologySchedule::matrix_at(long k) const {
  require(k >= 0, "schedule index must be nonnegative");
  return matrices_[static_cast<size_t>(k % period())];
}

Eigen::MatrixXd TopologySchedule::transition_product(long k, long s) const {
  require(0 <= s && s <= k, "transition product needs 0 <= s <= k");
  Eigen::MatrixXd product = matrix_at(s);
  for (long j = s + 1; j <= k; ++j) product = matrix_at(j) * product;
  return product;
}

}  // namespace dpnash
