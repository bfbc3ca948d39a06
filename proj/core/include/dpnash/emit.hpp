#pragma once

#include <string>
#include <vector>

#include "dpnash/audit.hpp"
#include "dpnash/monte_carlo.hpp"
#include "dpnash/seeker.hpp"

namespace dpnash {

// Shortest decimal form that round-trips a double exactly.
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);

// trace.csv: k, x_1..x_N, y_1..y_N, p_1..p_N.  The final row has no p
// columns populated (nothing is transmitted after the last update).
std::string trace_csv(const Trace& trace);
Trace read_trace_csv(const std::string& csv);

// mc_summary.csv: k, player, statistic, value, stderr.  Player is 1-based;
// aggregate statistics (mse_total, drift_abs, drift_signed) use player 0.
std::string mc_summary_csv(const McSummary& s);
std::string mc_summary_json(const McSummary& s);

// sweep.csv: d, mse, stderr.
std::string sweep_csv(const std::vector<SweepPoint>& points);
std::string sweep_json(const std::vector<SweepPoint>& points);

// histograms.csv: player, variable, bin_width, bin_lo, bin_hi, count.
std::string histograms_csv(const std::vector<Histogram>& hs);
std::string histograms_json(const std::vector<Histogram>& hs);

// bounds.json: inputs, report terms, and bound curves sampled at the probes.
std::string bound_report_json(const BoundSet& bounds, const std::vector<long>& probes);

std::string audit_json(const SensitivityAudit& a);
std::string dominance_json(const DominanceVerdict& v);

}  // namespace dpnash
