#pragma once

#include <map>
#include <string>
#include <vector>

#include "dsdr/evaluation.hpp"

namespace dsdr::report {

struct MetricsData {
  std::vector<int64_t> steps;
  std::map<std::string, std::vector<double>> columns;
};

// Reads a trainer metrics CSV (leading '#' comment lines skipped). Throws
// ConfigError naming the first missing required column.
MetricsData read_metrics_csv(const std::string& path);

// One SVG per component (adv, recon, cycle, intra, ce); one polyline point
// per logged row.
void write_loss_curves(const MetricsData& metrics, const std::string& out_dir);

// Reads a results CSV (held_out,seed,accuracy[,config_digest]) back into
// per-domain results.
std::vector<eval::ExperimentResult> read_results_csv(const std::string& path);

// Renders summary table + curves for a completed results directory.
// Returns the rendered table text.
std::string generate_report(const std::string& results_dir, bool force);

}  // namespace dsdr::report
