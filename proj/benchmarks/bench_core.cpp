#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "dpnash/privacy.hpp"
#include "dpnash/seeker.hpp"
#include "dpnash/topology.hpp"

namespace {

using namespace dpnash;

Eigen::VectorXd energy_targets() {
  Eigen::VectorXd t(5);
  t << 50, 55, 60, 65, 70;
  return t;
}

QuadraticAggregativeGame energy_game() {
  return QuadraticAggregativeGame(energy_targets(), 0.04, 5.0);
}

Topology cycle_topology() {
  Eigen::MatrixXd a(5, 5);
  a << 0.5, 0.2, 0.0, 0.0, 0.3,
       0.2, 0.5, 0.3, 0.0, 0.0,
       0.0, 0.3, 0.5, 0.2, 0.0,
       0.0, 0.0, 0.2, 0.5, 0.3,
       0.3, 0.0, 0.0, 0.3, 0.4;
  return Topology::validate(a);
}

TopologySchedule two_phase_schedule() {
  Eigen::MatrixXd even(5, 5);
  even << 0.3, 0.3, 0.0, 0.0, 0.4,
          0.3, 0.5, 0.2, 0.0, 0.0,
          0.0, 0.2, 0.5, 0.0, 0.3,
          0.0, 0.0, 0.0, 1.0, 0.0,
          0.4, 0.0, 0.3, 0.0, 0.3;
  Eigen::MatrixXd odd = Eigen::MatrixXd::Identity(5, 5);
  odd(3, 3) = 0.7;
  odd(3, 4) = 0.3;
  odd(4, 3) = 0.3;
  odd(4, 4) = 0.7;
  return TopologySchedule::validate({even, odd});
}

void BM_SolveNash(benchmark::State& state) {
  const QuadraticAggregativeGame game = energy_game();
  for (auto _ : state) benchmark::DoNotOptimize(game.solve_nash());
}
BENCHMARK(BM_SolveNash);

void BM_Replica(benchmark::State& state) {
  const QuadraticAggregativeGame game = energy_game();
  const Topology topo = cycle_topology();
  AlgorithmParams params;
  params.c = 1.0;
  params.q = 0.9;
  params.k_max = 175;
  NoiseParams noise;
  noise.d = 1.0;
  noise.q_bar = 0.99;
  long replica = 0;
  for (auto _ : state) {
    const NoiseStream stream(noise, 7, replica++);
    benchmark::DoNotOptimize(
        run(game, topo, params, stream, energy_targets()));
  }
  state.SetItemsProcessed(state.iterations() * params.k_max);
}
BENCHMARK(BM_Replica);

void BM_ReplicaSwitching(benchmark::State& state) {
  const QuadraticAggregativeGame game = energy_game();
  const TopologySchedule sched = two_phase_schedule();
  AlgorithmParams params;
  params.c = 1.0;
  params.q = 0.9;
  params.k_max = 175;
  NoiseParams noise;
  noise.d = 1.0;
  noise.q_bar = 0.99;
  long replica = 0;
  for (auto _ : state) {
    const NoiseStream stream(noise, 7, replica++);
    benchmark::DoNotOptimize(
        run_time_varying(game, sched, params, stream, energy_targets()));
  }
  state.SetItemsProcessed(state.iterations() * params.k_max);
}
BENCHMARK(BM_ReplicaSwitching);

void BM_NoiseDraw(benchmark::State& state) {
  NoiseParams noise;
  noise.d = 1.0;
  noise.q_bar = 0.99;
  const NoiseStream stream(noise, 7, 0);
  long k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(stream.draw(static_cast<int>(k % 5), k % 176));
    ++k;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_NoiseDraw);

void BM_TransitionProduct(benchmark::State& state) {
  const TopologySchedule sched = two_phase_schedule();
  const long k = state.range(0);
  for (auto _ : state)
    benchmark::DoNotOptimize(sched.transition_product(k, 0));
}
BENCHMARK(BM_TransitionProduct)->Arg(8)->Arg(60);

}  // namespace

BENCHMARK_MAIN();
