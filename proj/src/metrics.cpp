#include "vltrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace vltrack {
namespace {

std::vector<double> grid(int steps, double denom) {
  std::vector<double> t(steps + 1);
  for (int i = 0; i <= steps; ++i) t[i] = i / denom;
  return t;
}

void check_lengths(std::span<const BBox> preds, std::span<const BBox> gts,
                   const std::vector<bool>& absent) {
  if (preds.size() != gts.size() || gts.size() != absent.size()) {
    throw MetricError("prediction, ground-truth and absence lengths differ");
  }
}

bool evaluable(const BBox& gt, bool absent) { return !absent && !gt.degenerate(); }

// Per-frame error on every evaluable frame, sorted ascending.
template <typename ErrorFn>
std::vector<double> sorted_errors(std::span<const BBox> preds, std::span<const BBox> gts,
                                  const std::vector<bool>& absent, ErrorFn err) {
  check_lengths(preds, gts, absent);
  std::vector<double> e;
  e.reserve(gts.size());
  for (std::size_t i = 0; i < gts.size(); ++i) {
    if (evaluable(gts[i], absent[i])) e.push_back(err(preds[i], gts[i]));
  }
  if (e.empty()) throw MetricError("no evaluable frames");
  std::sort(e.begin(), e.end());
  return e;
}

double mean(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

// Fraction of errors <= threshold, for each threshold.
Curve at_most_curve(const std::vector<double>& sorted, std::vector<double> thresholds) {
  Curve c{std::move(thresholds), {}};
  const double n = static_cast<double>(sorted.size());
  for (double t : c.thresholds) {
    const auto k = std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
    c.values.push_back(static_cast<double>(k) / n);
  }
  return c;
}

constexpr double kMiss = std::numeric_limits<double>::infinity();

}  // namespace

std::vector<double> success_thresholds() { return grid(20, 20.0); }
std::vector<double> precision_thresholds() { return grid(50, 1.0); }
std::vector<double> normalized_precision_thresholds() { return grid(50, 100.0); }

MetricScore success_auc(std::span<const BBox> preds, std::span<const BBox> gts,
                        const std::vector<bool>& absent) {
  const auto ious = sorted_errors(preds, gts, absent,
                                  [](const BBox& p, const BBox& g) { return iou(p, g); });
  MetricScore s;
  s.n_eval_frames = ious.size();
  s.curve.thresholds = success_thresholds();
  const double n = static_cast<double>(ious.size());
  for (double tau : s.curve.thresholds) {
    const auto below = std::lower_bound(ious.begin(), ious.end(), tau) - ious.begin();
    s.curve.values.push_back(static_cast<double>(ious.size() - below) / n);
  }
  s.value = mean(s.curve.values);
  return s;
}

MetricScore precision(std::span<const BBox> preds, std::span<const BBox> gts,
                      const std::vector<bool>& absent, double threshold_px) {
  const auto errs = sorted_errors(preds, gts, absent, [](const BBox& p, const BBox& g) {
    return p.degenerate() ? kMiss : center_error(p, g);
  });
  MetricScore s;
  s.n_eval_frames = errs.size();
  s.curve = at_most_curve(errs, precision_thresholds());
  const auto k = std::upper_bound(errs.begin(), errs.end(), threshold_px) - errs.begin();
  s.value = static_cast<double>(k) / static_cast<double>(errs.size());
  return s;
}

MetricScore normalized_precision(std::span<const BBox> preds, std::span<const BBox> gts,
                                 const std::vector<bool>& absent) {
  const auto errs = sorted_errors(preds, gts, absent, [](const BBox& p, const BBox& g) {
    return p.degenerate() ? kMiss : normalized_center_error(p, g);
  });
  MetricScore s;
  s.n_eval_frames = errs.size();
  s.curve = at_most_curve(errs, normalized_precision_thresholds());
  s.value = mean(s.curve.values);
  return s;
}

SequenceScores score_sequence(const ResultTrack& track, const Sequence& seq) {
  if (track.boxes.size() != seq.size()) {
    throw MetricError(seq.name + ": results have " + std::to_string(track.boxes.size()) +
                      " boxes for " + std::to_string(seq.size()) + " frames");
  }
  SequenceScores out;
  const auto sr = success_auc(track.boxes, seq.groundtruth, seq.absent);
  const auto pr = precision(track.boxes, seq.groundtruth, seq.absent);
  const auto npr = normalized_precision(track.boxes, seq.groundtruth, seq.absent);
  out.auc = sr.value;
  out.pr = pr.value;
  out.npr = npr.value;
  out.success_50 = sr.curve.values[10];
  out.n_eval_frames = sr.n_eval_frames;
  out.success = sr.curve;
  out.precision = pr.curve;
  out.normalized_precision = npr.curve;
  return out;
}

EvalResult evaluate(const std::vector<ResultTrack>& tracks,
                    const std::vector<Sequence>& sequences) {
  std::map<std::string, const ResultTrack*> by_name;
  for (const auto& t : tracks) {
    if (!by_name.emplace(t.sequence_name, &t).second) {
      throw MetricError(t.sequence_name + ": duplicate results track");
    }
  }
  std::set<std::string> seq_names;
  std::map<std::string, SequenceScores> per_sequence;
  for (const auto& seq : sequences) {
    if (!seq_names.insert(seq.name).second) {
      throw MetricError(seq.name + ": duplicate sequence name");
    }
    const auto it = by_name.find(seq.name);
    if (it == by_name.end()) throw MetricError(seq.name + ": no results track");
    per_sequence.emplace(seq.name, score_sequence(*it->second, seq));
  }
  for (const auto& [name, _] : by_name) {
    if (!seq_names.count(name)) throw MetricError(name + ": results track has no sequence");
  }
  return aggregate(std::move(per_sequence));
}

EvalResult aggregate(std::map<std::string, SequenceScores> per_sequence) {
  if (per_sequence.empty()) throw MetricError("no sequences to aggregate");
  EvalResult r;
  r.per_sequence = std::move(per_sequence);
  const double n = static_cast<double>(r.per_sequence.size());

  auto mean_curve = [&](auto member) {
    Curve c;
    for (const auto& [_, s] : r.per_sequence) {
      const Curve& src = s.*member;
      if (c.thresholds.empty()) {
        c.thresholds = src.thresholds;
        c.values.assign(src.values.size(), 0.0);
      }
      for (std::size_t i = 0; i < src.values.size(); ++i) c.values[i] += src.values[i];
    }
    for (double& v : c.values) v /= n;
    return c;
  };
  r.success = mean_curve(&SequenceScores::success);
  r.precision = mean_curve(&SequenceScores::precision);
  r.normalized_precision = mean_curve(&SequenceScores::normalized_precision);

  for (const auto& [_, s] : r.per_sequence) {
    r.aggregate.auc += s.auc;
    r.aggregate.pr += s.pr;
    r.aggregate.npr += s.npr;
    r.aggregate.success_50 += s.success_50;
  }
  r.aggregate.auc /= n;
  r.aggregate.pr /= n;
  r.aggregate.npr /= n;
  r.aggregate.success_50 /= n;
  r.aggregate.n_sequences = r.per_sequence.size();
  return r;
}

}  // namespace vltrack
