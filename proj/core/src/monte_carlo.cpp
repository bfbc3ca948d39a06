#include "dpnash/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <thread>

#include "dpnash/errors.hpp"
#include "dpnash/seeker.hpp"

namespace dpnash {
namespace {

// Replicas are aggregated in fixed blocks of this size.  Each worker claims a
// whole block, accumulates its moments in replica order, and the main thread
// folds finished blocks in block order — so every job count reduces the same
// floating-point sums in the same order.
constexpr int kBlock = 64;

struct Moments {
  // Per probe-by-player sums of: (x-x*)^2 and its square, |y - xbar| and its
  // square, (y - xstar_bar) and its square.
  Eigen::MatrixXd se2, se2_sq, dev, dev_sq, bias, bias_sq;
  // Per probe sums of: ||x-x*||^2 and square, |1'y - 1'x| and square,
  // (1'y - 1'x) and square.
  Eigen::VectorXd agg, agg_sq, dabs, dabs_sq, dsgn, dsgn_sq;
  Eigen::MatrixXd terminal_x, terminal_y;  // replica-by-player for this block
  int count = 0;

  Moments(int probes, int players, int block) {
    se2 = Eigen::MatrixXd::Zero(probes, players);
    se2_sq = se2;
    dev = se2;
    dev_sq = se2;
    bias = se2;
    bias_sq = se2;
    agg = Eigen::VectorXd::Zero(probes);
    agg_sq = agg;
    dabs = agg;
    dabs_sq = agg;
    dsgn = agg;
    dsgn_sq = agg;
    terminal_x = Eigen::MatrixXd::Zero(block, players);
    terminal_y = terminal_x;
  }

  void fold(const Moments& o) {
    se2 += o.se2;
    se2_sq += o.se2_sq;
    dev += o.dev;
    dev_sq += o.dev_sq;
    bias += o.bias;
    bias_sq += o.bias_sq;
    agg += o.agg;
    agg_sq += o.agg_sq;
    dabs += o.dabs;
    dabs_sq += o.dabs_sq;
    dsgn += o.dsgn;
    dsgn_sq += o.dsgn_sq;
    count += o.count;
  }
};

struct ReplicaError {
  std::string message;
  long iteration = 0;
  long replica = 0;
};

void accumulate_replica(const Scenario& sc, const Eigen::VectorXd& xstar,
                        long replica, Moments& m, int slot) {
  const int n = sc.game.players();
  const auto& probes = sc.probe_iterations;
  const double xstar_mean = xstar.mean();

  RunOptions opts;
  opts.probes = probes;
  const NoiseStream noise(sc.noise, sc.seed, replica);
  Trace tr;
  if (sc.time_varying())
    tr = run_time_varying(sc.game, *sc.schedule(), sc.algorithm, noise, sc.x0, opts);
  else
    tr = run(sc.game, *sc.fixed_topology(), sc.algorithm, noise, sc.x0, opts);

  for (size_t pi = 0; pi < probes.size(); ++pi) {
    const auto& snap = tr.snapshots[pi];
    const double xbar = snap.x.mean();
    double agg = 0.0;
    for (int i = 0; i < n; ++i) {
      const double e2 = (snap.x[i] - xstar[i]) * (snap.x[i] - xstar[i]);
      const double dv = std::abs(snap.y[i] - xbar);
      const double bs = snap.y[i] - xstar_mean;
      m.se2(pi, i) += e2;
      m.se2_sq(pi, i) += e2 * e2;
      m.dev(pi, i) += dv;
      m.dev_sq(pi, i) += dv * dv;
      m.bias(pi, i) += bs;
      m.bias_sq(pi, i) += bs * bs;
      agg += e2;
    }
    const double drift = snap.y.sum() - snap.x.sum();
    m.agg[pi] += agg;
    m.agg_sq[pi] += agg * agg;
    m.dabs[pi] += std::abs(drift);
    m.dabs_sq[pi] += drift * drift;
    m.dsgn[pi] += drift;
    m.dsgn_sq[pi] += drift * drift;
  }
  m.terminal_x.row(slot) = tr.final_state.x.transpose();
  m.terminal_y.row(slot) = tr.final_state.y.transpose();
  ++m.count;
}

Eigen::MatrixXd stderr_of(const Eigen::MatrixXd& sum, const Eigen::MatrixXd& sum_sq, int n) {
  if (n < 2) return Eigen::MatrixXd::Zero(sum.rows(), sum.cols());
  Eigen::MatrixXd var =
      (sum_sq - sum.cwiseProduct(sum) / double(n)) / double(n - 1);
  return (var.cwiseMax(0.0) / double(n)).cwiseSqrt();
}

}  // namespace

double McSummary::terminal_aggregate_mse() const {
  return aggregate_mse[aggregate_mse.size() - 1];
}

double McSummary::terminal_aggregate_mse_se() const {
  return aggregate_mse_se[aggregate_mse_se.size() - 1];
}

McSummary run_monte_carlo(const Scenario& sc, int jobs) {
  if (jobs < 1) throw ValidationError("jobs must be at least 1");
  const int n = sc.game.players();
  const int probes = int(sc.probe_iterations.size());
  const long replicas = sc.replicas;
  const long blocks = (replicas + kBlock - 1) / kBlock;
  const Eigen::VectorXd xstar = sc.game.solve_nash();

  std::vector<Moments> done;
  done.reserve(blocks);
  for (long b = 0; b < blocks; ++b) done.emplace_back(probes, n, kBlock);
  std::vector<std::atomic<bool>> ready(blocks);
  for (auto& r : ready) r.store(false, std::memory_order_relaxed);

  std::atomic<long> next_block{0};
  std::mutex err_mu;
  std::vector<ReplicaError> errors;

  auto worker = [&]() {
    for (;;) {
      const long b = next_block.fetch_add(1, std::memory_order_relaxed);
      if (b >= blocks) return;
      const long lo = b * kBlock;
      const long hi = std::min(replicas, lo + kBlock);
      Moments& m = done[b];
      for (long r = lo; r < hi; ++r) {
        try {
          accumulate_replica(sc, xstar, r, m, int(r - lo));
        } catch (const DivergenceError& e) {
          std::lock_guard<std::mutex> lk(err_mu);
          errors.push_back({e.what(), e.iteration, r});
          return;
        }
      }
      ready[b].store(true, std::memory_order_release);
    }
  };

  const int workers = int(std::min<long>(jobs, blocks));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  if (!errors.empty()) {
    std::sort(errors.begin(), errors.end(),
              [](const ReplicaError& a, const ReplicaError& b) {
                return a.replica < b.replica;
              });
    throw DivergenceError(errors.front().message, errors.front().iteration,
                          errors.front().replica);
  }

  Moments total(probes, n, 0);
  for (long b = 0; b < blocks; ++b) {
    if (!ready[b].load(std::memory_order_acquire))
      throw ValidationError("monte carlo block was never completed");
    total.fold(done[b]);
  }

  McSummary out;
  out.probes = sc.probe_iterations;
  out.players = n;
  out.replicas = int(replicas);
  out.equilibrium = xstar;
  out.provenance = sc.fingerprint;

  const double r = double(replicas);
  out.per_player_mse = total.se2 / r;
  out.per_player_mse_se = stderr_of(total.se2, total.se2_sq, int(replicas));
  out.estimate_abs_error = total.dev / r;
  out.estimate_abs_error_se = stderr_of(total.dev, total.dev_sq, int(replicas));
  out.estimate_bias = total.bias / r;
  out.estimate_bias_se = stderr_of(total.bias, total.bias_sq, int(replicas));
  out.aggregate_mse = total.agg / r;
  out.aggregate_mse_se = stderr_of(total.agg, total.agg_sq, int(replicas));
  out.drift_abs = total.dabs / r;
  out.drift_abs_se = stderr_of(total.dabs, total.dabs_sq, int(replicas));
  out.drift_signed = total.dsgn / r;
  out.drift_signed_se = stderr_of(total.dsgn, total.dsgn_sq, int(replicas));

  out.terminal_x = Eigen::MatrixXd(replicas, n);
  out.terminal_y = Eigen::MatrixXd(replicas, n);
  for (long b = 0; b < blocks; ++b) {
    const long lo = b * kBlock;
    const long hi = std::min(replicas, lo + kBlock);
    out.terminal_x.middleRows(lo, hi - lo) = done[b].terminal_x.topRows(hi - lo);
    out.terminal_y.middleRows(lo, hi - lo) = done[b].terminal_y.topRows(hi - lo);
  }
  return out;
}

std::vector<SweepPoint> sweep_noise_scale(const Scenario& sc,
                                          const std::vector<double>& d_values,
                                          int jobs) {
  if (d_values.empty()) throw ValidationError("sweep requires at least one noise scale");
  std::vector<SweepPoint> out;
  out.reserve(d_values.size());
  for (double d : d_values) {
    if (!(d >= 0.0) || !std::isfinite(d))
      throw ValidationError("sweep noise scales must be finite and nonnegative");
    const McSummary s = run_monte_carlo(sc.with_noise_scale(d), jobs);
    out.push_back({d, s.terminal_aggregate_mse(), s.terminal_aggregate_mse_se()});
  }
  return out;
}

double Histogram::mode() const {
  size_t best = 0;
  for (size_t i = 1; i < counts.size(); ++i)
    if (counts[i] > counts[best]) best = i;
  if (bin_width == 0.0) return lo;
  return lo + (double(best) + 0.5) * bin_width;
}

namespace {

Histogram histogram_of(Eigen::VectorXd v, int player, char variable) {
  std::sort(v.data(), v.data() + v.size());
  const long n = v.size();
  Histogram h;
  h.player = player;
  h.variable = variable;

  const double lo = v[0], hi = v[n - 1];
  const double q1 = v[long(0.25 * double(n - 1))];
  const double q3 = v[long(0.75 * double(n - 1))];
  const double iqr = q3 - q1;
  double width = 2.0 * iqr / std::cbrt(double(n));
  if (width <= 0.0) width = (hi - lo) / std::max(1.0, std::ceil(std::sqrt(double(n))));

  if (width <= 0.0 || hi == lo) {
    h.lo = lo;
    h.bin_width = 0.0;
    h.counts = {n};
    return h;
  }

  const long bins = std::max<long>(1, long(std::ceil((hi - lo) / width)));
  h.lo = lo;
  h.bin_width = width;
  h.counts.assign(bins, 0);
  for (long i = 0; i < n; ++i) {
    long b = long((v[i] - lo) / width);
    if (b >= bins) b = bins - 1;
    ++h.counts[b];
  }
  return h;
}

}  // namespace

std::vector<Histogram> terminal_distribution(const McSummary& summary) {
  if (summary.terminal_x.rows() < 1)
    throw ValidationError("terminal distribution requires at least one replica");
  std::vector<Histogram> out;
  out.reserve(2 * summary.players);
  for (int i = 0; i < summary.players; ++i)
    out.push_back(histogram_of(summary.terminal_x.col(i), i, 'x'));
  for (int i = 0; i < summary.players; ++i)
    out.push_back(histogram_of(summary.terminal_y.col(i), i, 'y'));
  return out;
}

DominanceVerdict compare_to_bounds(const McSummary& summary, const BoundSet& bounds) {
  if (summary.replicas < 1)
    throw ValidationError("bound comparison requires a populated summary");
  if (!bounds.provenance.empty() && !summary.provenance.empty() &&
      bounds.provenance != summary.provenance)
    throw ValidationError(
        "bound comparison requires the summary and bounds to come from the "
        "same scenario (fingerprint mismatch)");

  const bool tv = bounds.report.time_varying;
  DominanceVerdict v;
  char buf[128];

  auto add = [&](const std::string& claim, long k, int player, double emp,
                 double se, double bound) {
    DominanceCheck c;
    c.claim = claim;
    c.k = k;
    c.player = player;
    c.empirical = emp;
    c.std_error = se;
    c.bound = bound;
    c.margin = bound + 4.0 * se - emp;
    c.pass = c.margin >= 0.0;
    if (!c.pass) v.pass = false;
    v.checks.push_back(c);
  };

  for (size_t pi = 0; pi < summary.probes.size(); ++pi) {
    const long k = summary.probes[pi];
    if (k < 1) continue;
    const double eb = tv ? estimation_error_bound_tv(bounds.inputs, k)
                         : estimation_error_bound(bounds.inputs, k);
    for (int i = 0; i < summary.players; ++i) {
      std::snprintf(buf, sizeof buf, "estimate error, player %d, k=%ld", i + 1, k);
      add(buf, k, i, summary.estimate_abs_error(pi, i),
          summary.estimate_abs_error_se(pi, i), eb);
    }
  }

  for (size_t pi = 0; pi < summary.probes.size(); ++pi) {
    const long k = summary.probes[pi];
    std::snprintf(buf, sizeof buf, "sum drift, k=%ld", k);
    add(buf, k, -1, summary.drift_abs[pi], summary.drift_abs_se[pi],
        consensus_drift_bound(bounds.inputs.players, bounds.inputs.d,
                              bounds.inputs.q_bar, k));
  }

  add("terminal mean-square error vs limit", summary.probes.back(), -1,
      summary.terminal_aggregate_mse(), summary.terminal_aggregate_mse_se(),
      bounds.report.mse_limit);

  v.min_margin = v.checks.front().margin;
  for (const auto& c : v.checks) v.min_margin = std::min(v.min_margin, c.margin);
  return v;
}

}  // namespace dpnash
