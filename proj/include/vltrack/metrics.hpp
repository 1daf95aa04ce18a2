#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vltrack/dataset.hpp"
#include "vltrack/geometry.hpp"

namespace vltrack {

class MetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Curve {
  std::vector<double> thresholds;
  std::vector<double> values;
};

struct MetricScore {
  double value = 0.0;
  Curve curve;
  std::size_t n_eval_frames = 0;
};

/// Threshold grids: IoU {0, 0.05, ..., 1}, center error {0, 1, ..., 50} px,
/// normalized error {0, 0.01, ..., 0.5}.
std::vector<double> success_thresholds();
std::vector<double> precision_thresholds();
std::vector<double> normalized_precision_thresholds();

inline constexpr double kPrecisionThresholdPx = 20.0;

// Frames with absent = true or degenerate ground truth are skipped. A
// degenerate prediction on an evaluated frame counts as a miss. All three
// throw MetricError on length mismatch or when nothing is evaluable.

/// Success curve (fraction with IoU >= tau); value = mean of the 21 points.
MetricScore success_auc(std::span<const BBox> preds, std::span<const BBox> gts,
                        const std::vector<bool>& absent);

/// Precision curve (fraction with center error <= theta px); value = curve
/// at `threshold_px`.
MetricScore precision(std::span<const BBox> preds, std::span<const BBox> gts,
                      const std::vector<bool>& absent,
                      double threshold_px = kPrecisionThresholdPx);

/// Normalized precision curve; value = mean of the 51 points.
MetricScore normalized_precision(std::span<const BBox> preds, std::span<const BBox> gts,
                                 const std::vector<bool>& absent);

struct SequenceScores {
  double auc = 0.0;
  double pr = 0.0;
  double npr = 0.0;
  double success_50 = 0.0;
  std::size_t n_eval_frames = 0;
  Curve success;
  Curve precision;
  Curve normalized_precision;
};

struct AggregateScores {
  double auc = 0.0;
  double pr = 0.0;
  double npr = 0.0;
  double success_50 = 0.0;
  std::size_t n_sequences = 0;
};

struct EvalResult {
  std::map<std::string, SequenceScores> per_sequence;
  AggregateScores aggregate;
  /// Unweighted means of the per-sequence curves.
  Curve success;
  Curve precision;
  Curve normalized_precision;
};

SequenceScores score_sequence(const ResultTrack& track, const Sequence& seq);

/// Scores every sequence against the track of the same name. Throws
/// MetricError naming the sequence on a missing or length-mismatched track.
EvalResult evaluate(const std::vector<ResultTrack>& tracks,
                    const std::vector<Sequence>& sequences);

/// Aggregates already-scored sequences (unweighted mean).
EvalResult aggregate(std::map<std::string, SequenceScores> per_sequence);

}  // namespace vltrack
