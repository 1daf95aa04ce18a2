#include "vltrack/localizer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "json.hpp"

#include "vltrack/dataset.hpp"

namespace vltrack {

using nlohmann::json;

bool LocalizerRequest::valid() const {
  return !template_image.empty() && !frame.empty() && !instruction.empty() &&
         frame_size.valid();
}

std::string_view to_string(LocalizeStatus s) {
  switch (s) {
    case LocalizeStatus::ok: return "ok";
    case LocalizeStatus::parse_failure: return "parse_failure";
    case LocalizeStatus::transport_error: return "transport_error";
    case LocalizeStatus::timeout: return "timeout";
  }
  return "unknown";
}

namespace {

void skip_ws(std::string_view s, std::size_t& i) {
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
}

bool read_number(std::string_view s, std::size_t& i, double& out) {
  skip_ws(s, i);
  std::size_t j = i;
  while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '-' ||
                          s[j] == '+' || s[j] == '.' || s[j] == 'e' || s[j] == 'E')) {
    ++j;
  }
  if (j == i) return false;
  const std::string token(s.substr(i, j - i));
  char* end = nullptr;
  out = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size() || !std::isfinite(out)) return false;
  i = j;
  return true;
}

// Parses `: [n, n, n, n]` starting right after the key.
std::optional<std::array<double, 4>> read_corner_array(std::string_view s, std::size_t i) {
  skip_ws(s, i);
  if (i >= s.size() || s[i] != ':') return std::nullopt;
  ++i;
  skip_ws(s, i);
  if (i >= s.size() || s[i] != '[') return std::nullopt;
  ++i;
  std::array<double, 4> v{};
  for (int k = 0; k < 4; ++k) {
    if (!read_number(s, i, v[k])) return std::nullopt;
    skip_ws(s, i);
    const char expected = k < 3 ? ',' : ']';
    if (i >= s.size() || s[i] != expected) return std::nullopt;
    ++i;
  }
  return v;
}

std::string shortest(double v) {
  if (v == 0.0) v = 0.0;  // drop negative zero
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::optional<BBox> parse_box(std::string_view raw_text, ImageSize frame_size) {
  if (!frame_size.valid()) return std::nullopt;
  constexpr std::string_view kKey = "\"bbox_2d\"";
  for (auto pos = raw_text.find(kKey); pos != std::string_view::npos;
       pos = raw_text.find(kKey, pos + kKey.size())) {
    const auto corners = read_corner_array(raw_text, pos + kKey.size());
    if (!corners) continue;
    auto [x1, y1, x2, y2] = *corners;

    const double width = frame_size.width;
    const double height = frame_size.height;
    const bool outside = std::min({x1, x2}) < 0 || std::max({x1, x2}) > width ||
                         std::min({y1, y2}) < 0 || std::max({y1, y2}) > height;
    const bool per_mille_range = std::max({x1, y1, x2, y2}) <= 1000.0 &&
                                 std::min({x1, y1, x2, y2}) >= 0.0;
    if (frame_size.max_side() > 1000 && per_mille_range && outside) {
      x1 *= width / 1000.0;
      x2 *= width / 1000.0;
      y1 *= height / 1000.0;
      y2 *= height / 1000.0;
    }
    const BBox box = clamp_to(BBox::from_corners(x1, y1, x2, y2), frame_size);
    if (box.degenerate()) return std::nullopt;
    return box;
  }
  return std::nullopt;
}

std::string format_box(const BBox& b) {
  return "{\"bbox_2d\": [" + shortest(b.x) + ", " + shortest(b.y) + ", " +
         shortest(b.right()) + ", " + shortest(b.bottom()) + "]}";
}

OracleLocalizer::OracleLocalizer(std::map<std::string, std::vector<BBox>> truth,
                                 double dx, double dy)
    : truth_(std::move(truth)), dx_(dx), dy_(dy) {}

LocalizerResponse OracleLocalizer::localize(const LocalizerRequest& req) {
  LocalizerResponse resp;
  const auto it = truth_.find(req.sequence);
  if (it == truth_.end() || req.frame_index == 0 || req.frame_index > it->second.size()) {
    resp.status = LocalizeStatus::transport_error;
    resp.error = "oracle has no truth for " + req.sequence + " frame " +
                 std::to_string(req.frame_index);
    return resp;
  }
  const BBox& gt = it->second[req.frame_index - 1];
  const BBox shifted = clamp_to({gt.x + dx_, gt.y + dy_, gt.w, gt.h}, req.frame_size);
  if (gt.degenerate() || shifted.degenerate()) {
    resp.status = LocalizeStatus::parse_failure;
    resp.raw_text = "The target is not visible in the current frame.";
    return resp;
  }
  resp.status = LocalizeStatus::ok;
  resp.raw_text = format_box(shifted);
  resp.box = shifted;
  return resp;
}

namespace {

json box_json(const BBox& b) { return json::array({b.x, b.y, b.w, b.h}); }

}  // namespace

std::string TranscriptEntry::to_json_line() const {
  nlohmann::ordered_json j;
  j["sequence"] = sequence;
  j["frame"] = frame_index;
  j["status"] = status;
  j["raw_text"] = raw_text;
  j["box"] = box ? box_json(*box) : json(nullptr);
  j["latency_ms"] = latency_ms;
  j["instruction"] = instruction;
  j["prompt_rect"] = prompt_rect ? json::array({prompt_rect->x0, prompt_rect->y0,
                                                prompt_rect->x1, prompt_rect->y1})
                                 : json(nullptr);
  j["frame_digest"] = frame_digest;
  j["source_digest"] = source_digest;
  return j.dump();
}

TranscriptEntry TranscriptEntry::from_json_line(std::string_view line) {
  const json j = json::parse(line);
  TranscriptEntry e;
  e.sequence = j.at("sequence").get<std::string>();
  e.frame_index = j.at("frame").get<std::size_t>();
  e.raw_text = j.value("raw_text", std::string{});
  e.status = j.value("status", std::string{"ok"});
  if (j.contains("box") && j["box"].is_array() && j["box"].size() == 4) {
    const auto& b = j["box"];
    e.box = BBox{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(),
                 b[3].get<double>()};
  }
  e.latency_ms = j.value("latency_ms", 0.0);
  e.instruction = j.value("instruction", std::string{});
  if (j.contains("prompt_rect") && j["prompt_rect"].is_array() &&
      j["prompt_rect"].size() == 4) {
    const auto& r = j["prompt_rect"];
    e.prompt_rect = PixelRect{r[0].get<int>(), r[1].get<int>(), r[2].get<int>(),
                              r[3].get<int>()};
  }
  e.frame_digest = j.value("frame_digest", std::string{});
  e.source_digest = j.value("source_digest", std::string{});
  return e;
}

std::vector<TranscriptEntry> read_transcript(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open transcript");
  std::vector<TranscriptEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      entries.push_back(TranscriptEntry::from_json_line(line));
    } catch (const std::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": malformed transcript line: " + e.what());
    }
  }
  return entries;
}

ScriptedLocalizer::ScriptedLocalizer(const std::vector<TranscriptEntry>& script) {
  for (const auto& e : script) replies_[{e.sequence, e.frame_index}] = e.raw_text;
}

ScriptedLocalizer ScriptedLocalizer::from_file(const std::filesystem::path& path) {
  return ScriptedLocalizer(read_transcript(path));
}

LocalizerResponse ScriptedLocalizer::localize(const LocalizerRequest& req) {
  LocalizerResponse resp;
  if (const auto it = replies_.find({req.sequence, req.frame_index}); it != replies_.end()) {
    resp.raw_text = it->second;
  }
  resp.box = parse_box(resp.raw_text, req.frame_size);
  resp.status = resp.box ? LocalizeStatus::ok : LocalizeStatus::parse_failure;
  return resp;
}

std::string image_digest(const cv::Mat& image) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const unsigned char* p, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  const int header[3] = {image.rows, image.cols, image.type()};
  mix(reinterpret_cast<const unsigned char*>(header), sizeof header);
  const std::size_t row_bytes = image.cols * image.elemSize();
  for (int r = 0; r < image.rows; ++r) mix(image.ptr<unsigned char>(r), row_bytes);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace vltrack
