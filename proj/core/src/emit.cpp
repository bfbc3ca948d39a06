#include "dpnash/emit.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dpnash/errors.hpp"

namespace dpnash {

using ordered = nlohmann::ordered_json;

std::string format_double(double v) {
  char best[32];
  std::snprintf(best, sizeof best, "%.17g", v);
  size_t best_len = std::strlen(best);
  for (int prec = 1; prec < 17; ++prec) {
    char t[32];
    std::snprintf(t, sizeof t, "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(t, "%lf", &back);
    if (back == v && std::strlen(t) < best_len) {
      std::memcpy(best, t, std::strlen(t) + 1);
      best_len = std::strlen(t);
    }
  }
  return best;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open for writing: " + path);
  out << content;
  if (!out) throw ValidationError("write failed: " + path);
}

namespace {

// Serialize with every double printed by format_double so JSON output is
// byte-stable and round-trips exactly.
std::string dump_pretty_ordered(const ordered& j, int indent = 0) {
  const std::string pad(indent + 2, ' ');
  const std::string close_pad(indent, ' ');
  switch (j.type()) {
    case ordered::value_t::number_float:
      return format_double(j.get<double>());
    case ordered::value_t::array: {
      if (j.empty()) return "[]";
      bool scalars = true;
      for (const auto& e : j)
        if (e.is_structured()) scalars = false;
      if (scalars && j.size() <= 16) {
        std::string out = "[";
        bool first = true;
        for (const auto& e : j) {
          if (!first) out += ", ";
          first = false;
          out += dump_pretty_ordered(e, 0);
        }
        return out + "]";
      }
      std::string out = "[\n";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad + dump_pretty_ordered(e, indent + 2);
      }
      return out + "\n" + close_pad + "]";
    }
    case ordered::value_t::object: {
      if (j.empty()) return "{}";
      std::string out = "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + ordered(it.key()).dump() + ": " +
               dump_pretty_ordered(it.value(), indent + 2);
      }
      return out + "\n" + close_pad + "}";
    }
    default:
      return j.dump();
  }
}

ordered ovec(const Eigen::VectorXd& v) {
  ordered a = ordered::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

ordered orows(const Eigen::MatrixXd& m) {
  ordered a = ordered::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ordered row = ordered::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    a.push_back(std::move(row));
  }
  return a;
}

}  // namespace

std::string trace_csv(const Trace& trace) {
  const auto& snaps = trace.snapshots;
  if (snaps.empty()) throw ValidationError("trace has no recorded snapshots");
  const int n = int(snaps.front().x.size());

  std::string out = "k";
  char head[24];
  for (int i = 1; i <= n; ++i) {
    std::snprintf(head, sizeof head, ",x_%d", i);
    out += head;
  }
  for (int i = 1; i <= n; ++i) {
    std::snprintf(head, sizeof head, ",y_%d", i);
    out += head;
  }
  for (int i = 1; i <= n; ++i) {
    std::snprintf(head, sizeof head, ",p_%d", i);
    out += head;
  }
  out += "\n";

  for (size_t r = 0; r < snaps.size(); ++r) {
    const auto& s = snaps[r];
    out += std::to_string(s.k);
    for (int i = 0; i < n; ++i) out += "," + format_double(s.x[i]);
    for (int i = 0; i < n; ++i) out += "," + format_double(s.y[i]);
    const bool has_p = r < trace.transmitted.size() &&
                       trace.transmitted[r].size() == n;
    for (int i = 0; i < n; ++i)
      out += has_p ? "," + format_double(trace.transmitted[r][i]) : ",";
    out += "\n";
  }
  return out;
}

Trace read_trace_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("trace csv is empty");

  int cols = 1;
  for (char c : line)
    if (c == ',') ++cols;
  if (cols < 4 || (cols - 1) % 3 != 0)
    throw ValidationError("trace csv header must be k,x_*,y_*,p_*");
  const int n = (cols - 1) / 3;

  Trace tr;
  long row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    size_t start = 0;
    for (;;) {
      size_t pos = line.find(',', start);
      if (pos == std::string::npos) {
        cells.push_back(line.substr(start));
        break;
      }
      cells.push_back(line.substr(start, pos - start));
      start = pos + 1;
    }
    if (int(cells.size()) != cols)
      throw ValidationError("trace csv row " + std::to_string(row) +
                            " has the wrong number of columns");

    auto cell = [&](int c) -> double {
      double v = 0.0;
      if (std::sscanf(cells[c].c_str(), "%lf", &v) != 1)
        throw ValidationError("trace csv row " + std::to_string(row) +
                              " column " + std::to_string(c + 1) +
                              " is not a number");
      return v;
    };

    SeekerState s;
    s.k = std::atol(cells[0].c_str());
    s.x.resize(n);
    s.y.resize(n);
    for (int i = 0; i < n; ++i) s.x[i] = cell(1 + i);
    for (int i = 0; i < n; ++i) s.y[i] = cell(1 + n + i);
    tr.snapshots.push_back(s);
    if (!cells[1 + 2 * n].empty()) {
      Eigen::VectorXd p(n);
      for (int i = 0; i < n; ++i) p[i] = cell(1 + 2 * n + i);
      tr.transmitted.push_back(p);
    }
  }
  if (tr.snapshots.empty()) throw ValidationError("trace csv has no data rows");
  tr.final_state = tr.snapshots.back();
  return tr;
}

std::string mc_summary_csv(const McSummary& s) {
  std::string out = "k,player,statistic,value,stderr\n";
  auto row = [&](long k, int player, const char* stat, double v, double se) {
    out += std::to_string(k) + "," + std::to_string(player) + "," + stat +
           "," + format_double(v) + "," + format_double(se) + "\n";
  };
  for (size_t pi = 0; pi < s.probes.size(); ++pi) {
    const long k = s.probes[pi];
    for (int i = 0; i < s.players; ++i) {
      row(k, i + 1, "mse", s.per_player_mse(pi, i), s.per_player_mse_se(pi, i));
      row(k, i + 1, "est_abs_err", s.estimate_abs_error(pi, i),
          s.estimate_abs_error_se(pi, i));
      row(k, i + 1, "est_bias", s.estimate_bias(pi, i), s.estimate_bias_se(pi, i));
    }
    row(k, 0, "mse_total", s.aggregate_mse[pi], s.aggregate_mse_se[pi]);
    row(k, 0, "drift_abs", s.drift_abs[pi], s.drift_abs_se[pi]);
    row(k, 0, "drift_signed", s.drift_signed[pi], s.drift_signed_se[pi]);
  }
  return out;
}

std::string mc_summary_json(const McSummary& s) {
  ordered j;
  j["scenario_fingerprint"] = s.provenance;
  j["replicas"] = s.replicas;
  j["players"] = s.players;
  j["probes"] = s.probes;
  j["equilibrium"] = ovec(s.equilibrium);
  j["per_player_mse"] = orows(s.per_player_mse);
  j["per_player_mse_stderr"] = orows(s.per_player_mse_se);
  j["estimate_abs_error"] = orows(s.estimate_abs_error);
  j["estimate_abs_error_stderr"] = orows(s.estimate_abs_error_se);
  j["estimate_bias"] = orows(s.estimate_bias);
  j["estimate_bias_stderr"] = orows(s.estimate_bias_se);
  j["aggregate_mse"] = ovec(s.aggregate_mse);
  j["aggregate_mse_stderr"] = ovec(s.aggregate_mse_se);
  j["drift_abs"] = ovec(s.drift_abs);
  j["drift_abs_stderr"] = ovec(s.drift_abs_se);
  j["drift_signed"] = ovec(s.drift_signed);
  j["drift_signed_stderr"] = ovec(s.drift_signed_se);
  j["terminal_mean_x"] = ovec(s.terminal_x.colwise().mean());
  j["terminal_mean_y"] = ovec(s.terminal_y.colwise().mean());
  return dump_pretty_ordered(j) + "\n";
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
  std::string out = "d,mse,stderr\n";
  for (const auto& p : points)
    out += format_double(p.d) + "," + format_double(p.terminal_mse) + "," +
           format_double(p.std_error) + "\n";
  return out;
}

std::string sweep_json(const std::vector<SweepPoint>& points) {
  ordered arr = ordered::array();
  for (const auto& p : points) {
    ordered e;
    e["d"] = p.d;
    e["mse"] = p.terminal_mse;
    e["stderr"] = p.std_error;
    arr.push_back(std::move(e));
  }
  ordered j;
  j["sweep"] = std::move(arr);
  return dump_pretty_ordered(j) + "\n";
}

std::string histograms_csv(const std::vector<Histogram>& hs) {
  std::string out = "player,variable,bin_width,bin_lo,bin_hi,count\n";
  for (const auto& h : hs) {
    for (size_t b = 0; b < h.counts.size(); ++b) {
      const double lo = h.lo + double(b) * h.bin_width;
      const double hi = h.bin_width == 0.0 ? lo : lo + h.bin_width;
      out += std::to_string(h.player + 1) + "," + h.variable + "," +
             format_double(h.bin_width) + "," + format_double(lo) + "," +
             format_double(hi) + "," + std::to_string(h.counts[b]) + "\n";
    }
  }
  return out;
}

std::string histograms_json(const std::vector<Histogram>& hs) {
  ordered arr = ordered::array();
  for (const auto& h : hs) {
    ordered e;
    e["player"] = h.player + 1;
    e["variable"] = std::string(1, h.variable);
    e["lo"] = h.lo;
    e["bin_width"] = h.bin_width;
    e["counts"] = h.counts;
    e["mode"] = h.mode();
    arr.push_back(std::move(e));
  }
  ordered j;
  j["histograms"] = std::move(arr);
  return dump_pretty_ordered(j) + "\n";
}

std::string bound_report_json(const BoundSet& bounds, const std::vector<long>& probes) {
  const BoundInputs& in = bounds.inputs;
  const BoundReport& r = bounds.report;

  ordered j;
  j["scenario_fingerprint"] = bounds.provenance;
  ordered ji;
  ji["players"] = in.players;
  ji["strong_monotonicity"] = in.constants.strong_monotonicity;
  ji["lipschitz"] = ordered::array();
  for (double l : in.constants.lipschitz) ji["lipschitz"].push_back(l);
  ji["gradient_bound"] = in.constants.gradient_bound;
  ji["c"] = in.c;
  ji["q"] = in.q;
  ji["d"] = in.d;
  ji["q_bar"] = in.q_bar;
  ji["initial_estimate_bound"] = in.initial_estimate_bound;
  ji["initial_distance"] = in.initial_distance;
  if (in.gamma) ji["gamma"] = *in.gamma;
  if (in.theta) ji["theta"] = *in.theta;
  if (in.beta) ji["beta"] = *in.beta;
  j["inputs"] = std::move(ji);

  ordered jr;
  jr["initial_error_term"] = r.initial_error_term;
  jr["stepsize_term"] = r.stepsize_term;
  jr["estimation_lag_term"] = r.estimation_lag_term;
  jr["noise_term"] = r.noise_term;
  jr["mse_limit"] = r.mse_limit;
  jr["noise_scale"] = r.noise_scale;
  jr["epsilon"] = std::isfinite(r.epsilon) ? ordered(r.epsilon) : ordered("inf");
  jr["time_varying"] = r.time_varying;
  j["report"] = std::move(jr);

  ordered curves;
  curves["k"] = probes;
  ordered est = ordered::array(), drift = ordered::array();
  for (long k : probes) {
    if (k >= 1)
      est.push_back(r.time_varying ? estimation_error_bound_tv(in, k)
                                   : estimation_error_bound(in, k));
    else
      est.push_back(nullptr);
    drift.push_back(consensus_drift_bound(in.players, in.d, in.q_bar, k));
  }
  curves["estimation_error_bound"] = std::move(est);
  curves["sum_drift_bound"] = std::move(drift);
  j["curves"] = std::move(curves);
  return dump_pretty_ordered(j) + "\n";
}

std::string audit_json(const SensitivityAudit& a) {
  ordered j;
  j["epsilon"] = a.epsilon;
  j["gradient_bound"] = a.gradient_bound;
  j["horizon"] = a.horizon;
  j["observations_identical"] = a.observations_identical;
  j["max_observation_gap"] = a.max_observation_gap;
  j["max_coupling_residual"] = a.max_coupling_residual;
  j["min_step_margin"] = a.min_step_margin;
  j["budget_sum"] = a.budget_sum;
  j["budget_margin"] = a.budget_margin;
  j["drift_tolerance"] = a.drift_tolerance;
  j["deviation"] = a.deviation;
  j["pass"] = a.pass;
  return dump_pretty_ordered(j) + "\n";
}

std::string dominance_json(const DominanceVerdict& v) {
  ordered arr = ordered::array();
  for (const auto& c : v.checks) {
    ordered e;
    e["claim"] = c.claim;
    e["k"] = c.k;
    e["player"] = c.player >= 0 ? ordered(c.player + 1) : ordered(0);
    e["empirical"] = c.empirical;
    e["stderr"] = c.std_error;
    e["bound"] = c.bound;
    e["margin"] = c.margin;
    e["pass"] = c.pass;
    arr.push_back(std::move(e));
  }
  ordered j;
  j["checks"] = std::move(arr);
  j["min_margin"] = v.min_margin;
  j["pass"] = v.pass;
  return dump_pretty_ordered(j) + "\n";
}

}  // namespace dpnash
