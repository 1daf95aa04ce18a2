#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <opencv2/core.hpp>

#include "vltrack/geometry.hpp"

namespace vltrack {

/// Everything a localizer sees for one frame: template T, the (possibly
/// prompted) frame, and the instruction text. `sequence` and `frame_index`
/// (1-based) identify the frame for mock backends and transcripts.
struct LocalizerRequest {
  cv::Mat template_image;
  cv::Mat frame;
  std::string instruction;
  ImageSize frame_size;
  std::string sequence;
  std::size_t frame_index = 0;

  bool valid() const;
};

enum class LocalizeStatus {
  ok,
  parse_failure,
  transport_error,
  timeout,
};

std::string_view to_string(LocalizeStatus s);

struct LocalizerResponse {
  LocalizeStatus status = LocalizeStatus::parse_failure;
  std::string raw_text;
  /// Present iff status == ok; clamped into the frame.
  std::optional<BBox> box;
  double latency_ms = 0.0;
  /// Transport diagnostics, including the raw response body when there was one.
  std::string error;

  bool ok() const { return status == LocalizeStatus::ok && box.has_value(); }
};

/// The model M in B_t = M(T, L', I_t'). Implementations must tolerate
/// concurrent localize() calls.
class Localizer {
 public:
  virtual ~Localizer() = default;
  virtual LocalizerResponse localize(const LocalizerRequest& req) = 0;
};

/// Extracts the first `"bbox_2d": [x1, y1, x2, y2]` object from free text,
/// converts to (x, y, w, h) and clamps to the frame. Per-mille coordinates
/// are accepted only when the frame's longest side exceeds 1000, all four
/// values are <= 1000, and the absolute reading would leave the frame.
/// Returns nullopt when no usable (non-degenerate, in-frame) box exists.
std::optional<BBox> parse_box(std::string_view raw_text, ImageSize frame_size);

/// Renders a box in the answer grammar: {"bbox_2d": [x1, y1, x2, y2]}.
std::string format_box(const BBox& b);

/// Answers with per-sequence ground truth, optionally shifted. Frames whose
/// truth is degenerate answer with a refusal (parse failure).
class OracleLocalizer : public Localizer {
 public:
  explicit OracleLocalizer(std::map<std::string, std::vector<BBox>> truth,
                           double dx = 0.0, double dy = 0.0);
  LocalizerResponse localize(const LocalizerRequest& req) override;

 private:
  std::map<std::string, std::vector<BBox>> truth_;
  double dx_;
  double dy_;
};

/// One line of a transcript log.
struct TranscriptEntry {
  std::string sequence;
  std::size_t frame_index = 0;
  std::string status = "ok";
  std::string raw_text;
  std::optional<BBox> box;
  double latency_ms = 0.0;
  std::string instruction;
  /// Drawn prompt rectangle, absent for promptless requests.
  std::optional<PixelRect> prompt_rect;
  std::string frame_digest;
  std::string source_digest;

  std::string to_json_line() const;
  static TranscriptEntry from_json_line(std::string_view line);
};

std::vector<TranscriptEntry> read_transcript(const std::filesystem::path& path);

/// Replays recorded raw texts keyed by (sequence, frame); unknown frames
/// answer with an empty string. The parser runs on every reply.
class ScriptedLocalizer : public Localizer {
 public:
  explicit ScriptedLocalizer(const std::vector<TranscriptEntry>& script);
  static ScriptedLocalizer from_file(const std::filesystem::path& path);

  LocalizerResponse localize(const LocalizerRequest& req) override;

 private:
  std::map<std::pair<std::string, std::size_t>, std::string> replies_;
};

/// FNV-1a over dimensions, type and pixel bytes, as 16 hex digits.
std::string image_digest(const cv::Mat& image);

}  // namespace vltrack
