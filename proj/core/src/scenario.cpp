#include "dpnash/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace dpnash {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& path,
                       const std::string& msg) {
  throw ValidationError(origin + ": " + (path.empty() ? "" : path + ": ") + msg);
}

std::pair<int, int> line_col_of(const std::string& text, size_t byte) {
  int line = 1, col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

void check_keys(const json& obj, const std::string& origin, const std::string& path,
                const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key()))
      fail(origin, path + "/" + item.key(), "unknown key (rejected, not ignored)");
  }
}

const json& get_required(const json& obj, const std::string& origin,
                         const std::string& path, const std::string& key) {
  if (!obj.contains(key)) fail(origin, path + "/" + key, "missing required key");
  return obj.at(key);
}

double get_number(const json& obj, const std::string& origin, const std::string& path,
                  const std::string& key) {
  const json& v = get_required(obj, origin, path, key);
  if (!v.is_number()) fail(origin, path + "/" + key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(origin, path + "/" + key, "value must be finite");
  return x;
}

long get_integer(const json& obj, const std::string& origin, const std::string& path,
                 const std::string& key) {
  const json& v = get_required(obj, origin, path, key);
  if (!v.is_number_integer())
    fail(origin, path + "/" + key, "expected an integer");
  return v.get<long>();
}

Eigen::VectorXd get_vector(const json& v, const std::string& origin,
                           const std::string& path, int expected_size) {
  if (!v.is_array()) fail(origin, path, "expected a numeric array");
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number())
      fail(origin, path + "/" + std::to_string(i), "expected a number");
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    if (!std::isfinite(out[static_cast<Eigen::Index>(i)]))
      fail(origin, path + "/" + std::to_string(i), "value must be finite");
  }
  if (expected_size >= 0 && out.size() != expected_size)
    fail(origin, path,
         "expected " + std::to_string(expected_size) + " entries, got " +
             std::to_string(out.size()));
  return out;
}

std::string format17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json vector_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    arr.push_back(json::parse(format17(v[i])));
  return arr;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t hash = 0xCBF29CE484222325ull;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 0x100000001B3ull;
  }
  return hash;
}

std::string rederive_fingerprint(const Scenario& s) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_scenario_json(s))));
  return buf;
}

}  // namespace

std::vector<long> default_probe_grid(long k_max) {
  std::vector<long> grid;
  for (long k = 0; k <= std::min<long>(100, k_max); ++k) grid.push_back(k);
  double next = 100.0;
  while (true) {
    next *= 1.1;
    const long k = std::lround(next);
    if (k >= k_max) break;
    if (k > grid.back()) grid.push_back(k);
  }
  if (grid.back() != k_max) grid.push_back(k_max);
  return grid;
}

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& err) {
    const auto [line, col] = line_col_of(text, err.byte > 0 ? err.byte - 1 : 0);
    throw ValidationError(origin + ":" + std::to_string(line) + ":" +
                          std::to_string(col) + ": " + err.what());
  }
  if (!root.is_object()) fail(origin, "", "scenario must be a JSON object");
  check_keys(root, origin, "",
             {"game", "topology", "algorithm", "noise", "x0", "seed", "replicas",
              "probe_iterations"});

  // game
  const json& jgame = get_required(root, origin, "", "game");
  if (!jgame.is_object()) fail(origin, "/game", "expected an object");
  check_keys(jgame, origin, "/game",
             {"n_players", "targets", "agg_price_slope", "agg_price_offset",
              "bound_box"});
  const long n_players = get_integer(jgame, origin, "/game", "n_players");
  if (n_players < 2) fail(origin, "/game/n_players", "need at least 2 players");
  const int n = static_cast<int>(n_players);
  const Eigen::VectorXd targets = get_vector(
      get_required(jgame, origin, "/game", "targets"), origin, "/game/targets", n);
  const double slope = get_number(jgame, origin, "/game", "agg_price_slope");
  const double offset = get_number(jgame, origin, "/game", "agg_price_offset");
  QuadraticAggregativeGame game(targets, slope, offset);

  // topology
  const json& jtopo = get_required(root, origin, "", "topology");
  if (!jtopo.is_object()) fail(origin, "/topology", "expected an object");
  check_keys(jtopo, origin, "/topology", {"mode", "matrices", "period"});
  const json& jmode = get_required(jtopo, origin, "/topology", "mode");
  if (!jmode.is_string()) fail(origin, "/topology/mode", "expected a string");
  const std::string mode = jmode.get<std::string>();
  if (mode != "fixed" && mode != "periodic")
    fail(origin, "/topology/mode", "must be \"fixed\" or \"periodic\"");
  const json& jmats = get_required(jtopo, origin, "/topology", "matrices");
  if (!jmats.is_array() || jmats.empty())
    fail(origin, "/topology/matrices", "expected a nonempty array of matrices");
  std::vector<Eigen::MatrixXd> matrices;
  for (size_t l = 0; l < jmats.size(); ++l) {
    const std::string mpath = "/topology/matrices/" + std::to_string(l);
    const Eigen::VectorXd flat = get_vector(jmats[l], origin, mpath, n * n);
    Eigen::MatrixXd w(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) w(i, j) = flat[i * n + j];  // row-major
    matrices.push_back(std::move(w));
  }
  if (jtopo.contains("period")) {
    const long period = get_integer(jtopo, origin, "/topology", "period");
    if (period != static_cast<long>(matrices.size()))
      fail(origin, "/topology/period",
           "must equal the number of matrices (" +
               std::to_string(matrices.size()) + ")");
  }
  if (mode == "fixed" && matrices.size() != 1)
    fail(origin, "/topology/matrices", "fixed mode takes exactly one matrix");

  // algorithm
  const json& jalg = get_required(root, origin, "", "algorithm");
  if (!jalg.is_object()) fail(origin, "/algorithm", "expected an object");
  check_keys(jalg, origin, "/algorithm", {"c", "q", "k_max"});
  AlgorithmParams algorithm;
  algorithm.c = get_number(jalg, origin, "/algorithm", "c");
  algorithm.q = get_number(jalg, origin, "/algorithm", "q");
  if (!(algorithm.c > 0.0)) fail(origin, "/algorithm/c", "must be positive");
  if (!(algorithm.q > 0.0 && algorithm.q < 1.0))
    fail(origin, "/algorithm/q", "must lie in (0, 1)");
  if (jalg.contains("k_max")) {
    const long k_max = get_integer(jalg, origin, "/algorithm", "k_max");
    if (k_max < 1) fail(origin, "/algorithm/k_max", "must be >= 1");
    algorithm.k_max = k_max;
  } else {
    algorithm.k_max = AlgorithmParams::default_horizon(algorithm.c, algorithm.q);
  }

  // noise
  const json& jnoise = get_required(root, origin, "", "noise");
  if (!jnoise.is_object()) fail(origin, "/noise", "expected an object");
  check_keys(jnoise, origin, "/noise", {"d", "q_bar"});
  NoiseParams noise;
  noise.d = get_number(jnoise, origin, "/noise", "d");
  noise.q_bar = get_number(jnoise, origin, "/noise", "q_bar");
  if (noise.d < 0.0) fail(origin, "/noise/d", "must be >= 0");
  if (!(noise.q_bar > 0.0 && noise.q_bar < 1.0))
    fail(origin, "/noise/q_bar", "must lie in (0, 1)");
  if (noise.q_bar <= algorithm.q)
    fail(origin, "/noise/q_bar",
         "must exceed algorithm.q: the privacy budget "
         "2cCq_bar/(d(q_bar - q)) requires q < q_bar < 1");

  // x0, seed, replicas
  const Eigen::VectorXd x0 =
      get_vector(get_required(root, origin, "", "x0"), origin, "/x0", n);
  const json& jseed = get_required(root, origin, "", "seed");
  if (!jseed.is_number_integer() ||
      (!jseed.is_number_unsigned() && jseed.get<long long>() < 0))
    fail(origin, "/seed", "expected a nonnegative integer");
  const std::uint64_t seed = jseed.get<std::uint64_t>();
  const long replicas = get_integer(root, origin, "", "replicas");
  if (replicas < 1) fail(origin, "/replicas", "must be >= 1");

  // probe grid
  std::vector<long> probes;
  if (root.contains("probe_iterations")) {
    const json& jprobes = root.at("probe_iterations");
    if (!jprobes.is_array() || jprobes.empty())
      fail(origin, "/probe_iterations", "expected a nonempty integer array");
    for (size_t i = 0; i < jprobes.size(); ++i) {
      if (!jprobes[i].is_number_integer())
        fail(origin, "/probe_iterations/" + std::to_string(i),
             "expected an integer");
      probes.push_back(jprobes[i].get<long>());
    }
    for (size_t i = 0; i < probes.size(); ++i) {
      if (probes[i] < 0 || probes[i] > algorithm.k_max)
        fail(origin, "/probe_iterations/" + std::to_string(i),
             "must lie in [0, k_max]");
      if (i > 0 && probes[i] <= probes[i - 1])
        fail(origin, "/probe_iterations/" + std::to_string(i),
             "must be strictly increasing");
    }
  } else {
    probes = default_probe_grid(algorithm.k_max);
  }

  // topology validation (after n known)
  std::variant<Topology, TopologySchedule> topology =
      mode == "fixed"
          ? std::variant<Topology, TopologySchedule>(
                Topology::validate(matrices.front()))
          : std::variant<Topology, TopologySchedule>(
                TopologySchedule::validate(std::move(matrices)));

  // bound box
  Box box;
  if (jgame.contains("bound_box")) {
    const json& jbox = jgame.at("bound_box");
    if (!jbox.is_object()) fail(origin, "/game/bound_box", "expected an object");
    check_keys(jbox, origin, "/game/bound_box", {"lower", "upper"});
    box.lower = get_vector(get_required(jbox, origin, "/game/bound_box", "lower"),
                           origin, "/game/bound_box/lower", n);
    box.upper = get_vector(get_required(jbox, origin, "/game/bound_box", "upper"),
                           origin, "/game/bound_box/upper", n);
    box.validate();
  } else {
    box = game.default_bound_box(x0);
  }

  Scenario scenario{std::move(game),
                    std::move(topology),
                    algorithm,
                    noise,
                    x0,
                    seed,
                    static_cast<int>(replicas),
                    std::move(probes),
                    std::move(box),
                    ""};
  scenario.fingerprint = rederive_fingerprint(scenario);
  return scenario;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path.filename().string());
}

std::string canonical_scenario_json(const Scenario& s) {
  json root;  // nlohmann::json orders keys lexicographically
  root["game"]["n_players"] = s.game.players();
  root["game"]["targets"] = vector_json(s.game.targets());
  root["game"]["agg_price_slope"] = json::parse(format17(s.game.slope()));
  root["game"]["agg_price_offset"] = json::parse(format17(s.game.offset()));
  root["game"]["bound_box"]["lower"] = vector_json(s.bound_box.lower);
  root["game"]["bound_box"]["upper"] = vector_json(s.bound_box.upper);
  root["topology"]["mode"] = s.time_varying() ? "periodic" : "fixed";
  json mats = json::array();
  const auto flatten = [](const Eigen::MatrixXd& w) {
    json flat = json::array();
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j)
        flat.push_back(json::parse(format17(w(i, j))));
    return flat;
  };
  if (s.time_varying()) {
    for (int l = 0; l < s.schedule()->period(); ++l)
      mats.push_back(flatten(s.schedule()->matrix_at(l)));
    root["topology"]["period"] = s.schedule()->period();
  } else {
    mats.push_back(flatten(s.fixed_topology()->weights()));
    root["topology"]["period"] = 1;
  }
  root["topology"]["matrices"] = std::move(mats);
  root["algorithm"]["c"] = json::parse(format17(s.algorithm.c));
  root["algorithm"]["q"] = json::parse(format17(s.algorithm.q));
  root["algorithm"]["k_max"] = s.algorithm.k_max;
  root["noise"]["d"] = json::parse(format17(s.noise.d));
  root["noise"]["q_bar"] = json::parse(format17(s.noise.q_bar));
  root["x0"] = vector_json(s.x0);
  root["seed"] = s.seed;
  root["replicas"] = s.replicas;
  root["probe_iterations"] = s.probe_iterations;
  return root.dump();
}

Scenario Scenario::with_seed(std::uint64_t new_seed) const {
  Scenario out = *this;
  out.seed = new_seed;
  out.fingerprint = rederive_fingerprint(out);
  return out;
}

Scenario Scenario::with_noise_scale(double new_d) const {
  if (new_d < 0.0) throw ValidationError("noise scale d must be >= 0");
  Scenario out = *this;
  out.noise.d = new_d;
  out.fingerprint = rederive_fingerprint(out);
  return out;
}

Scenario Scenario::with_replicas(int new_replicas) const {
  if (new_replicas < 1) throw ValidationError("replicas must be >= 1");
  Scenario out = *this;
  out.replicas = new_replicas;
  out.fingerprint = rederive_fingerprint(out);
  return out;
}

BoundInputs bound_inputs_for(const Scenario& s) {
  BoundInputs in;
  in.constants = estimate_constants(s.game, s.bound_box);
  in.players = s.game.players();
  in.c = s.algorithm.c;
  in.q = s.algorithm.q;
  in.d = s.noise.d;
  in.q_bar = s.noise.q_bar;
  in.initial_estimate_bound = s.x0.cwiseAbs().maxCoeff();
  in.initial_distance = (s.x0 - s.game.solve_nash()).norm();
  if (s.time_varying()) {
    in.theta = s.schedule()->theta();
    in.beta = s.schedule()->beta();
  } else {
    in.gamma = s.fixed_topology()->gamma();
  }
  in.validate();
  return in;
}

BoundSet bounds_for(const Scenario& s) {
  BoundSet set{bound_inputs_for(s), {}, s.fingerprint};
  set.report = s.time_varying() ? mse_bound_tv(set.inputs) : mse_bound(set.inputs);
  return set;
}

}  // namespace dpnash
