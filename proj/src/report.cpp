#include "vltrack/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "vltrack/dataset.hpp"

namespace vltrack {

using nlohmann::ordered_json;

namespace {

ordered_json curve_json(const Curve& c) {
  ordered_json j;
  j["thresholds"] = c.thresholds;
  j["values"] = c.values;
  return j;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_curve_csv(const EvalResult& r, const Curve& mean_curve,
                     const Curve SequenceScores::*member,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(path.string() + ": cannot write");
  out << "threshold,mean";
  for (const auto& [name, _] : r.per_sequence) out << "," << csv_field(name);
  out << "\n";
  char buf[64];
  for (std::size_t i = 0; i < mean_curve.thresholds.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.2f,%.6f", mean_curve.thresholds[i], mean_curve.values[i]);
    out << buf;
    for (const auto& [_, s] : r.per_sequence) {
      std::snprintf(buf, sizeof buf, ",%.6f", (s.*member).values[i]);
      out << buf;
    }
    out << "\n";
  }
}

}  // namespace

std::string report_json(const EvalResult& r) {
  ordered_json j;
  j["schema"] = "vltrack.eval/1";
  j["aggregate"]["auc"] = r.aggregate.auc;
  j["aggregate"]["pr"] = r.aggregate.pr;
  j["aggregate"]["npr"] = r.aggregate.npr;
  j["aggregate"]["success_50"] = r.aggregate.success_50;
  j["aggregate"]["n_sequences"] = r.aggregate.n_sequences;
  j["per_sequence"] = ordered_json::object();
  for (const auto& [name, s] : r.per_sequence) {
    auto& e = j["per_sequence"][name];
    e["auc"] = s.auc;
    e["pr"] = s.pr;
    e["npr"] = s.npr;
    e["success_50"] = s.success_50;
    e["n_eval_frames"] = s.n_eval_frames;
  }
  j["curves"]["success"] = curve_json(r.success);
  j["curves"]["precision"] = curve_json(r.precision);
  j["curves"]["normalized_precision"] = curve_json(r.normalized_precision);
  return j.dump(2) + "\n";
}

std::string report_table(const EvalResult& r) {
  std::size_t width = 9;
  for (const auto& [name, _] : r.per_sequence) width = std::max(width, name.size());
  const int w = static_cast<int>(width);

  std::string out;
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-*s %8s %8s %8s %8s %8s\n", w, "sequence", "AUC", "PR",
                "NPR", "SR@0.5", "frames");
  out += buf;
  out += std::string(width + 45, '-') + "\n";
  for (const auto& [name, s] : r.per_sequence) {
    std::snprintf(buf, sizeof buf, "%-*s %8.2f %8.2f %8.2f %8.2f %8zu\n", w, name.c_str(),
                  100 * s.auc, 100 * s.pr, 100 * s.npr, 100 * s.success_50, s.n_eval_frames);
    out += buf;
  }
  std::size_t total_frames = 0;
  for (const auto& [_, s] : r.per_sequence) total_frames += s.n_eval_frames;
  out += std::string(width + 45, '-') + "\n";
  std::snprintf(buf, sizeof buf, "%-*s %8.2f %8.2f %8.2f %8.2f %8zu\n", w, "aggregate",
                100 * r.aggregate.auc, 100 * r.aggregate.pr, 100 * r.aggregate.npr,
                100 * r.aggregate.success_50, total_frames);
  out += buf;
  return out;
}

void write_curve_csvs(const EvalResult& r, const std::filesystem::path& dir) {
  write_curve_csv(r, r.success, &SequenceScores::success, dir / "success.csv");
  write_curve_csv(r, r.precision, &SequenceScores::precision, dir / "precision.csv");
  write_curve_csv(r, r.normalized_precision, &SequenceScores::normalized_precision,
                  dir / "normalized_precision.csv");
}

}  // namespace vltrack
