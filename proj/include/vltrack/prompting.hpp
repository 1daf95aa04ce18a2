#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <opencv2/core.hpp>

#include "vltrack/geometry.hpp"

namespace vltrack {

class PromptError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Rgb {
  std::uint8_t r = 255;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Appearance of the location prompt drawn onto search frames.
struct PromptStyle {
  Rgb color{255, 0, 0};
  /// Stroke width in pixels; nullopt selects max(2, round(0.004 * longest side)).
  std::optional<int> thickness;
  double enlarge_factor = 2.0;

  int thickness_for(ImageSize frame) const;
  /// Throws PromptError on thickness < 1 or non-positive enlarge factor.
  void validate() const;
};

/// Instruction text with exactly one `{description}` placeholder.
class InstructionTemplate {
 public:
  static constexpr std::string_view kPlaceholder = "{description}";

  /// Throws PromptError unless `text` contains the placeholder exactly once.
  explicit InstructionTemplate(std::string text);

  static InstructionTemplate default_template();
  static InstructionTemplate load(const std::filesystem::path& file);

  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

/// Appended when a prompt rectangle is drawn on the frame.
extern const std::string_view kPromptClause;
/// Always closes the instruction; fixes the answer grammar.
extern const std::string_view kOutputFormatClause;

/// Visual template: exact crop of the first-frame box, never resized.
cv::Mat extract_template(const cv::Mat& first_frame, const BBox& b1);

/// Pixel rectangle the prompt for `prev_box` occupies on a frame of `frame`
/// size, i.e. the enlarged and clamped box snapped to the pixel grid. Empty
/// when nothing would be drawn.
PixelRect prompt_region(const BBox& prev_box, const PromptStyle& style, ImageSize frame);

/// Copy of `frame` with a hollow rectangle stroked inward along
/// prompt_region(). A degenerate `prev_box` yields an unmodified copy.
cv::Mat render_prompt(const cv::Mat& frame, const BBox& prev_box, const PromptStyle& style);

/// Fills the description into the template; adds the prompt clause when
/// `vp_enabled`, then the output-format clause. Throws PromptError on an
/// empty description.
std::string build_instruction(const InstructionTemplate& tmpl,
                              const std::string& description, bool vp_enabled);

}  // namespace vltrack
