#pragma once

#include <filesystem>
#include <string>

#include "vltrack/metrics.hpp"

namespace vltrack {

/// Machine-readable report, schema "vltrack.eval/1":
///
///   {
///     "schema": "vltrack.eval/1",
///     "aggregate": {"auc", "pr", "npr", "success_50", "n_sequences"},
///     "per_sequence": {"<name>": {"auc", "pr", "npr", "success_50", "n_eval_frames"}},
///     "curves": {
///       "success":              {"thresholds": [21], "values": [21]},
///       "precision":            {"thresholds": [51], "values": [51]},
///       "normalized_precision": {"thresholds": [51], "values": [51]}
///     }
///   }
///
/// Curves are the unweighted means over sequences; all scalars lie in [0, 1].
std::string report_json(const EvalResult& result);

/// Fixed-width text table, one row per sequence plus the aggregate row.
/// Scores printed in percent.
std::string report_table(const EvalResult& result);

/// Writes success.csv, precision.csv and normalized_precision.csv into
/// `dir`: columns threshold, mean, then one column per sequence.
void write_curve_csvs(const EvalResult& result, const std::filesystem::path& dir);

}  // namespace vltrack
