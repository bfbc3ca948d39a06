#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "dpnash/bounds.hpp"
#include "dpnash/game.hpp"
#include "dpnash/privacy.hpp"
#include "dpnash/seeker.hpp"
#include "dpnash/topology.hpp"

namespace dpnash {

// A fully validated experiment description.  Every sub-configuration has
// passed its module validator; defaults (horizon, probe grid, bound box) are
// resolved; `fingerprint` digests the canonical serialization so derived
// artifacts can prove they came from the same scenario.
struct Scenario {
  QuadraticAggregativeGame game;
  std::variant<Topology, TopologySchedule> topology;
  AlgorithmParams algorithm;
  NoiseParams noise;
  Eigen::VectorXd x0;
  std::uint64_t seed = 0;
  int replicas = 1;
  std::vector<long> probe_iterations;
  Box bound_box;
  std::string fingerprint;

  bool time_varying() const {
    return std::holds_alternative<TopologySchedule>(topology);
  }
  const Topology* fixed_topology() const { return std::get_if<Topology>(&topology); }
  const TopologySchedule* schedule() const {
    return std::get_if<TopologySchedule>(&topology);
  }

  // Copies with one field changed; the fingerprint is re-derived.
  Scenario with_seed(std::uint64_t new_seed) const;
  Scenario with_noise_scale(double new_d) const;
  Scenario with_replicas(int new_replicas) const;
};

// Every iteration up to 100, then multiplicative steps, always ending at k_max.
std::vector<long> default_probe_grid(long k_max);

Scenario load_scenario(const std::filesystem::path& path);
// `origin` labels error messages (a filename or "<string>").
Scenario parse_scenario(const std::string& text, const std::string& origin);

// Canonical serialization: sorted keys, 17-significant-digit numbers.
// Reparsing it reproduces the scenario (and its fingerprint) exactly.
std::string canonical_scenario_json(const Scenario& scenario);

BoundInputs bound_inputs_for(const Scenario& scenario);

struct BoundSet {
  BoundInputs inputs;
  BoundReport report;
  std::string provenance;
};

// Bound inputs and the limiting-MSE report matching the scenario's topology.
BoundSet bounds_for(const Scenario& scenario);

}  // namespace dpnash
