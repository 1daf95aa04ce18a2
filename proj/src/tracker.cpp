#include "vltrack/tracker.hpp"

#include <stdexcept>

#include <opencv2/imgcodecs.hpp>

namespace vltrack {

TrackerState init(const cv::Mat& first_frame, const BBox& b1, std::string description,
                  std::string sequence) {
  TrackerState s;
  s.template_image = extract_template(first_frame, b1);
  s.description = std::move(description);
  s.sequence = std::move(sequence);
  s.last_box = b1;
  s.last_box_valid = true;
  s.frame_index = 1;
  return s;
}

StepResult step(const TrackerState& state, const cv::Mat& frame, const TrackConfig& cfg) {
  if (!cfg.localizer) throw std::invalid_argument("TrackConfig has no localizer");

  const bool draw = cfg.vp_enabled && state.last_box_valid;
  const ImageSize size = ImageSize::of(frame);

  LocalizerRequest req;
  req.template_image = state.template_image;
  req.frame_size = size;
  req.sequence = state.sequence;
  req.frame_index = state.frame_index + 1;

  std::optional<PixelRect> drawn;
  if (draw) {
    const PixelRect r = prompt_region(state.last_box, cfg.prompt_style, size);
    if (!r.empty()) drawn = r;
  }
  req.frame = drawn ? render_prompt(frame, state.last_box, cfg.prompt_style) : frame;
  // No prompt clause unless a rectangle actually went onto the frame.
  req.instruction = build_instruction(cfg.instruction_template, state.description,
                                      drawn.has_value());

  LocalizerResponse resp;
  try {
    resp = cfg.localizer->localize(req);
  } catch (const std::exception& e) {
    resp = LocalizerResponse{};
    resp.status = LocalizeStatus::transport_error;
    resp.error = e.what();
  }

  StepResult out{state, state.last_box};
  out.state.frame_index = req.frame_index;
  if (resp.ok()) {
    out.prediction = *resp.box;
    out.state.last_box = *resp.box;
    out.state.last_box_valid = true;
  } else {
    // repeat_last: keep B_{t-1}, query the next frame globally.
    out.state.last_box_valid = false;
  }

  if (cfg.observer) {
    cfg.observer(StepRecord{state.sequence, req.frame_index, frame, req, resp, drawn,
                            out.prediction});
  }
  return out;
}

cv::Mat read_frame(const fs::path& path) {
  cv::Mat img = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (img.empty()) throw DataError(path.string() + ": unreadable frame");
  return img;
}

ResultTrack track_sequence(const Sequence& seq, const TrackConfig& cfg) {
  if (!cfg.localizer) throw std::invalid_argument("TrackConfig has no localizer");
  seq.validate();
  ResultTrack track{seq.name, {}};
  track.boxes.reserve(seq.size());

  TrackerState state = init(read_frame(seq.frames.front()), seq.groundtruth.front(),
                            seq.description, seq.name);
  track.boxes.push_back(seq.groundtruth.front());
  for (std::size_t t = 1; t < seq.size(); ++t) {
    auto [next, prediction] = step(state, read_frame(seq.frames[t]), cfg);
    state = std::move(next);
    track.boxes.push_back(prediction);
  }
  return track;
}

}  // namespace vltrack
