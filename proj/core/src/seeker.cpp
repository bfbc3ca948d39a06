#include "dpnash/seeker.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace dpnash {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

void check_guard(const Eigen::VectorXd& x, double guard, long k) {
  if (!x.allFinite() || x.cwiseAbs().maxCoeff() > guard)
    throw DivergenceError("iterate exceeded the divergence guard " +
                              std::to_string(guard) + " at iteration " +
                              std::to_string(k),
                          k);
}

struct StepBuffers {
  Eigen::VectorXd w, p, grad, x_prev;
  explicit StepBuffers(int n) : w(n), p(n), grad(n), x_prev(n) {}
};

// Shared kernel: every public entry point advances states through this exact
// arithmetic, so fixed runs, scheduled runs, and single steps agree bitwise.
void advance(const AggregativeGame& game, const Eigen::MatrixXd& weights,
             const AlgorithmParams& params, const NoiseStream& noise, long k,
             Eigen::VectorXd& x, Eigen::VectorXd& y, StepBuffers& buf) {
  const int n = game.players();
  const double scale = noise.scale_at(k);
  for (int i = 0; i < n; ++i) buf.w[i] = scale * noise.unit_draw(i, k);
  buf.p = y + buf.w;
  const double alpha = params.stepsize(k);
  for (int i = 0; i < n; ++i)
    buf.grad[i] = game.partial_gradient_estimated(i, x[i], y[i]);
  buf.x_prev = x;
  x -= alpha * buf.grad;
  y.noalias() = weights * buf.p;
  y += x - buf.x_prev;
}

template <typename WeightsAt>
Trace run_impl(const AggregativeGame& game, WeightsAt&& weights_at, int topo_size,
               const AlgorithmParams& params, const NoiseStream& noise,
               const Eigen::VectorXd& x0, const RunOptions& opts) {
  params.validate();
  const int n = game.players();
  require(topo_size == n, "topology size " + std::to_string(topo_size) +
                              " does not match player count " + std::to_string(n));
  require(x0.size() == n, "x0 has dimension " + std::to_string(x0.size()) +
                              ", expected " + std::to_string(n));
  require(x0.allFinite(), "x0 must be finite");
  for (size_t i = 1; i < opts.probes.size(); ++i)
    require(opts.probes[i - 1] < opts.probes[i],
            "probe iterations must be strictly increasing");
  require(opts.probes.empty() ||
              (opts.probes.front() >= 0 && opts.probes.back() <= params.k_max),
          "probe iterations must lie in [0, k_max]");

  Eigen::VectorXd x = x0;
  Eigen::VectorXd y = x0;
  StepBuffers buf(n);

  Trace trace;
  if (opts.record_full) {
    trace.snapshots.reserve(static_cast<size_t>(params.k_max) + 1);
    trace.transmitted.reserve(static_cast<size_t>(params.k_max));
    trace.noises.reserve(static_cast<size_t>(params.k_max));
  } else {
    trace.snapshots.reserve(opts.probes.size());
  }
  size_t probe_idx = 0;
  const auto snapshot_if_due = [&](long k) {
    if (opts.record_full) {
      trace.snapshots.push_back({k, x, y});
    } else if (probe_idx < opts.probes.size() && opts.probes[probe_idx] == k) {
      trace.snapshots.push_back({k, x, y});
      ++probe_idx;
    }
  };

  for (long k = 0; k < params.k_max; ++k) {
    check_guard(x, opts.divergence_guard, k);
    snapshot_if_due(k);
    advance(game, weights_at(k), params, noise, k, x, y, buf);
    if (opts.record_full) {
      trace.transmitted.push_back(buf.p);
      trace.noises.push_back(buf.w);
    }
  }
  check_guard(x, opts.divergence_guard, params.k_max);
  snapshot_if_due(params.k_max);
  trace.final_state = {params.k_max, std::move(x), std::move(y)};
  return trace;
}

}  // namespace

void AlgorithmParams::validate() const {
  require(std::isfinite(c) && c > 0.0, "stepsize scale c must be positive");
  require(q > 0.0 && q < 1.0, "stepsize decay q must lie in (0, 1)");
  require(k_max >= 1, "iteration horizon k_max must be >= 1");
}

double AlgorithmParams::stepsize(long k) const {
  return c * std::pow(q, static_cast<double>(k));
}

long AlgorithmParams::default_horizon(double c, double q) {
  require(std::isfinite(c) && c > 0.0, "stepsize scale c must be positive");
  require(q > 0.0 && q < 1.0, "stepsize decay q must lie in (0, 1)");
  constexpr double kFloor = 1e-8;
  long k = std::max<long>(
      1, static_cast<long>(std::ceil(std::log(kFloor / c) / std::log(q))) - 2);
  while (c * std::pow(q, static_cast<double>(k)) >= kFloor) ++k;
  return k;
}

SeekerState step(const AggregativeGame& game, const Eigen::MatrixXd& weights,
                 const AlgorithmParams& params, const NoiseStream& noise,
                 const SeekerState& state) {
  params.validate();
  const int n = game.players();
  require(weights.rows() == n && weights.cols() == n,
          "weight matrix size does not match player count");
  require(state.k >= 0 && state.k < params.k_max,
          "state iteration must lie in [0, k_max)");
  require(state.x.size() == n && state.y.size() == n,
          "state vectors do not match player count");
  check_guard(state.x, 1e12, state.k);

  Eigen::VectorXd x = state.x;
  Eigen::VectorXd y = state.y;
  StepBuffers buf(n);
  advance(game, weights, params, noise, state.k, x, y, buf);
  check_guard(x, 1e12, state.k + 1);
  return {state.k + 1, std::move(x), std::move(y)};
}

SeekerState step(const AggregativeGame& game, const Topology& topo,
                 const AlgorithmParams& params, const NoiseStream& noise,
                 const SeekerState& state) {
  return step(game, topo.weights(), params, noise, state);
}

SeekerState step(const AggregativeGame& game, const TopologySchedule& schedule,
                 const AlgorithmParams& params, const NoiseStream& noise,
                 const SeekerState& state) {
  return step(game, schedule.matrix_at(state.k), params, noise, state);
}

Trace run(const AggregativeGame& game, const Topology& topo,
          const AlgorithmParams& params, const NoiseStream& noise,
          const Eigen::VectorXd& x0, const RunOptions& opts) {
  return run_impl(
      game, [&](long) -> const Eigen::MatrixXd& { return topo.weights(); },
      topo.size(), params, noise, x0, opts);
}

Trace run_time_varying(const AggregativeGame& game, const TopologySchedule& schedule,
                       const AlgorithmParams& params, const NoiseStream& noise,
                       const Eigen::VectorXd& x0, const RunOptions& opts) {
  return run_impl(
      game,
      [&](long k) -> const Eigen::MatrixXd& { return schedule.matrix_at(k); },
      schedule.size(), params, noise, x0, opts);
}

}  // namespace dpnash
