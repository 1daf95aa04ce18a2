#include "vltrack/prompting.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace vltrack {

const std::string_view kPromptClause =
    "The rectangle drawn on the current frame marks where the target was in "
    "the previous frame. Search inside this rectangle first; if the target is "
    "not inside it, search the whole image.";

const std::string_view kOutputFormatClause =
    "Answer with a single line of the form {\"bbox_2d\": [x1, y1, x2, y2]}, "
    "giving the top-left and bottom-right corners of the target in absolute "
    "pixel coordinates of the full current frame.";

namespace {

constexpr std::string_view kDefaultTemplate =
    "You are tracking a single object through a video. The first image is a "
    "template showing the target as it appears in the first frame. The second "
    "image is the current full-resolution frame. The target is described as: "
    "\"{description}\". Locate the target in the current frame.";

std::size_t count_occurrences(const std::string& text, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

}  // namespace

int PromptStyle::thickness_for(ImageSize frame) const {
  if (thickness) return *thickness;
  const int scaled = static_cast<int>(std::lround(0.004 * frame.max_side()));
  return std::max(2, scaled);
}

void PromptStyle::validate() const {
  if (thickness && *thickness < 1) throw PromptError("prompt thickness must be >= 1");
  if (!(enlarge_factor > 0.0)) throw PromptError("enlarge factor must be positive");
}

InstructionTemplate::InstructionTemplate(std::string text) : text_(std::move(text)) {
  const auto n = count_occurrences(text_, kPlaceholder);
  if (n != 1) {
    throw PromptError("instruction template must contain " +
                      std::string(kPlaceholder) + " exactly once (found " +
                      std::to_string(n) + ")");
  }
}

InstructionTemplate InstructionTemplate::default_template() {
  return InstructionTemplate(std::string(kDefaultTemplate));
}

InstructionTemplate InstructionTemplate::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw PromptError(file.string() + ": cannot open template file");
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  return InstructionTemplate(std::move(text));
}

cv::Mat extract_template(const cv::Mat& first_frame, const BBox& b1) {
  if (b1.degenerate()) throw GeometryError("template box is degenerate");
  return crop(first_frame, b1);
}

PixelRect prompt_region(const BBox& prev_box, const PromptStyle& style, ImageSize frame) {
  if (prev_box.degenerate()) return {};
  return pixel_region(enlarge(prev_box, style.enlarge_factor, frame), frame);
}

cv::Mat render_prompt(const cv::Mat& frame, const BBox& prev_box, const PromptStyle& style) {
  cv::Mat out = frame.clone();
  const ImageSize size = ImageSize::of(frame);
  const PixelRect r = prompt_region(prev_box, style, size);
  if (r.empty()) return out;

  const int t = style.thickness_for(size);
  const int tx = std::min(t, r.width());
  const int ty = std::min(t, r.height());
  const cv::Scalar color = out.channels() == 1
                               ? cv::Scalar(style.color.r)
                               : cv::Scalar(style.color.b, style.color.g, style.color.r);
  out(cv::Rect(r.x0, r.y0, r.width(), ty)).setTo(color);
  out(cv::Rect(r.x0, r.y1 - ty, r.width(), ty)).setTo(color);
  out(cv::Rect(r.x0, r.y0, tx, r.height())).setTo(color);
  out(cv::Rect(r.x1 - tx, r.y0, tx, r.height())).setTo(color);
  return out;
}

std::string build_instruction(const InstructionTemplate& tmpl,
                              const std::string& description, bool vp_enabled) {
  if (description.empty()) throw PromptError("empty target description");
  std::string text = tmpl.text();
  const auto pos = text.find(InstructionTemplate::kPlaceholder);
  text.replace(pos, InstructionTemplate::kPlaceholder.size(), description);
  if (vp_enabled) {
    text += ' ';
    text += kPromptClause;
  }
  text += ' ';
  text += kOutputFormatClause;
  return text;
}

}  // namespace vltrack
