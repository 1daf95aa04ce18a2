#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include <opencv2/core.hpp>

#include "vltrack/dataset.hpp"
#include "vltrack/geometry.hpp"
#include "vltrack/localizer.hpp"
#include "vltrack/prompting.hpp"

namespace vltrack {

enum class FallbackPolicy { repeat_last };

/// Everything observable about one tracked frame (t >= 2). References are
/// valid only for the duration of the callback.
struct StepRecord {
  const std::string& sequence;
  std::size_t frame_index;
  const cv::Mat& source_frame;
  const LocalizerRequest& request;
  const LocalizerResponse& response;
  /// Drawn rectangle; nullopt when the frame went out unprompted.
  std::optional<PixelRect> prompt_rect;
  BBox prediction;
};

using StepObserver = std::function<void(const StepRecord&)>;

struct TrackConfig {
  bool vp_enabled = true;
  PromptStyle prompt_style;
  InstructionTemplate instruction_template = InstructionTemplate::default_template();
  FallbackPolicy fallback = FallbackPolicy::repeat_last;
  std::shared_ptr<Localizer> localizer;
  /// Called after every localizer round trip; must be thread-safe when
  /// sequences are tracked in parallel.
  StepObserver observer;
};

struct TrackerState {
  cv::Mat template_image;
  std::string description;
  std::string sequence;
  BBox last_box;
  bool last_box_valid = false;
  std::size_t frame_index = 0;  // 1-based index of the last processed frame
};

struct StepResult {
  TrackerState state;
  BBox prediction;
};

/// Crops the template from frame 1 and seeds the state with B_1.
TrackerState init(const cv::Mat& first_frame, const BBox& b1, std::string description,
                  std::string sequence = {});

/// Advances one frame: prompt (when enabled and the last box is trusted),
/// query, update. Localizer failures never escape: the last box is repeated
/// and the next frame is queried without a prompt.
StepResult step(const TrackerState& state, const cv::Mat& frame, const TrackConfig& cfg);

/// Reads a frame as 8-bit BGR. Throws DataError naming the path.
cv::Mat read_frame(const fs::path& path);

/// Full one-pass run: boxes[0] is the first-frame ground truth, one box per
/// frame thereafter.
ResultTrack track_sequence(const Sequence& seq, const TrackConfig& cfg);

}  // namespace vltrack
