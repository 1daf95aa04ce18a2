#include "vltrack/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <opencv2/imgcodecs.hpp>

namespace vltrack {
namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    out += items[i];
  }
  return out;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  if (!lines.empty() && lines.front().rfind("\xEF\xBB\xBF", 0) == 0) {
    lines.front().erase(0, 3);
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

bool parse_number(const std::string& token, double& out) {
  if (token.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(token.c_str(), &end);
  return errno == 0 && end == token.c_str() + token.size();
}

// Comma-separated when a comma is present (empty fields kept so they fail
// to parse), otherwise whitespace/tab separated.
std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  if (line.find(',') != std::string::npos) {
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) tokens.push_back(trim(item));
    if (!line.empty() && line.back() == ',') tokens.emplace_back();
    return tokens;
  }
  std::stringstream ss(line);
  std::string item;
  while (ss >> item) tokens.push_back(item);
  return tokens;
}

std::vector<bool> read_absence_flags(const fs::path& path, std::size_t n) {
  const auto lines = read_lines(path);
  std::vector<bool> flags;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (const auto& tok : tokenize(lines[i])) {
      double v = 0;
      if (!parse_number(tok, v) || (v != 0.0 && v != 1.0)) {
        throw DataError(path.string() + ":" + std::to_string(i + 1) +
                        ": absence flag must be 0 or 1, got '" + tok + "'");
      }
      flags.push_back(v == 1.0);
    }
  }
  if (flags.size() != n) {
    throw DataError(path.string() + ": row-count mismatch: " +
                    std::to_string(flags.size()) + " flags for " +
                    std::to_string(n) + " frames");
  }
  return flags;
}

}  // namespace

LayoutConfig LayoutConfig::tnl2k() { return LayoutConfig{}; }

LayoutConfig LayoutConfig::tnllt() {
  LayoutConfig c;
  c.name = "tnllt";
  c.image_dir = "img";
  c.groundtruth_file = "groundtruth.txt";
  c.language_file = "nlp.txt";
  c.absence_files = {"full_occlusion.txt", "out_of_view.txt"};
  return c;
}

LayoutConfig LayoutConfig::resolve(const std::string& preset_or_path) {
  if (preset_or_path == "tnl2k") return tnl2k();
  if (preset_or_path == "tnllt") return tnllt();
  if (fs::is_regular_file(preset_or_path)) return load(preset_or_path);
  throw DataError("unknown layout '" + preset_or_path +
                  "' (expected tnl2k, tnllt or a layout file)");
}

LayoutConfig LayoutConfig::parse(const std::string& text, const std::string& origin) {
  LayoutConfig c;
  c.name = "custom";
  std::stringstream ss(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(line_no);
    if (eq == std::string::npos) throw DataError(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "name") {
      c.name = value;
    } else if (key == "image_dir") {
      c.image_dir = value;
    } else if (key == "groundtruth") {
      c.groundtruth_file = value;
    } else if (key == "language") {
      c.language_file = value;
    } else if (key == "absence_files") {
      c.absence_files = split_list(value);
    } else if (key == "extensions") {
      c.extensions.clear();
      for (auto& e : split_list(value)) c.extensions.push_back(lower(e));
    } else if (key == "frame_order") {
      if (value == "natural") {
        c.frame_order = FrameOrder::natural;
      } else if (value == "lexicographic") {
        c.frame_order = FrameOrder::lexicographic;
      } else {
        throw DataError(where + ": frame_order must be natural or lexicographic");
      }
    } else {
      throw DataError(where + ": unknown key '" + key + "'");
    }
  }
  if (c.image_dir.empty() || c.groundtruth_file.empty() || c.language_file.empty()) {
    throw DataError(origin + ": image_dir, groundtruth and language must be non-empty");
  }
  if (c.extensions.empty()) throw DataError(origin + ": extensions must be non-empty");
  return c;
}

LayoutConfig LayoutConfig::load(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError(file.string() + ": cannot open layout file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), file.string());
}

std::string LayoutConfig::to_string() const {
  std::ostringstream out;
  out << "name = " << name << "\n"
      << "image_dir = " << image_dir << "\n"
      << "groundtruth = " << groundtruth_file << "\n"
      << "language = " << language_file << "\n"
      << "absence_files = " << join(absence_files) << "\n"
      << "extensions = " << join(extensions) << "\n"
      << "frame_order = "
      << (frame_order == FrameOrder::natural ? "natural" : "lexicographic") << "\n";
  return out.str();
}

void Sequence::validate() const {
  const auto n = frames.size();
  if (n == 0) throw DataError(name + ": sequence has no frames");
  if (groundtruth.size() != n || absent.size() != n) {
    throw DataError(name + ": row-count mismatch between frames and annotations");
  }
  if (groundtruth[0].degenerate() || absent[0]) {
    throw DataError(name + ": target must be present in the first frame");
  }
  if (description.empty()) throw DataError(name + ": empty language description");
  if (!image_size.valid()) throw DataError(name + ": invalid image size");
}

bool natural_less(const std::string& a, const std::string& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const bool da = std::isdigit(static_cast<unsigned char>(a[i]));
    const bool db = std::isdigit(static_cast<unsigned char>(b[j]));
    if (da && db) {
      std::size_t ie = i, je = j;
      while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie]))) ++ie;
      while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je]))) ++je;
      // Compare numerically without overflow: strip leading zeros, then length.
      std::size_t is = i, js = j;
      while (is + 1 < ie && a[is] == '0') ++is;
      while (js + 1 < je && b[js] == '0') ++js;
      if (ie - is != je - js) return ie - is < je - js;
      const int cmp = a.compare(is, ie - is, b, js, je - js);
      if (cmp != 0) return cmp < 0;
      if (ie - i != je - j) return ie - i < je - j;
      i = ie;
      j = je;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  return a.size() - i < b.size() - j;
}

BBox parse_box_row(const std::string& line, const std::string& origin,
                   std::size_t line_no) {
  const std::string where = origin + ":" + std::to_string(line_no);
  const auto tokens = tokenize(trim(line));
  if (tokens.size() != 4) {
    throw DataError(where + ": expected 4 fields x,y,w,h, got '" + line + "'");
  }
  double v[4];
  for (int k = 0; k < 4; ++k) {
    if (!parse_number(tokens[k], v[k])) {
      throw DataError(where + ": unparsable value '" + tokens[k] + "'");
    }
  }
  if (!std::isfinite(v[0]) || !std::isfinite(v[1]) || !std::isfinite(v[2]) ||
      !std::isfinite(v[3])) {
    return BBox{};
  }
  if (v[2] < 0 || v[3] < 0) throw DataError(where + ": negative box extent");
  return {v[0], v[1], v[2], v[3]};
}

Sequence load_sequence(const fs::path& dir, const LayoutConfig& layout) {
  Sequence seq;
  seq.name = dir.filename().string();
  if (seq.name.empty()) seq.name = dir.parent_path().filename().string();

  const fs::path image_dir = dir / layout.image_dir;
  if (!fs::is_directory(image_dir)) {
    throw DataError(image_dir.string() + ": missing image directory");
  }
  std::vector<fs::path> frames;
  for (const auto& entry : fs::directory_iterator(image_dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = lower(entry.path().extension().string());
    if (std::find(layout.extensions.begin(), layout.extensions.end(), ext) !=
        layout.extensions.end()) {
      frames.push_back(entry.path());
    }
  }
  if (frames.empty()) throw DataError(image_dir.string() + ": no frame images");
  std::sort(frames.begin(), frames.end(), [&](const fs::path& a, const fs::path& b) {
    const auto fa = a.filename().string();
    const auto fb = b.filename().string();
    return layout.frame_order == FrameOrder::natural ? natural_less(fa, fb) : fa < fb;
  });

  const fs::path gt_path = dir / layout.groundtruth_file;
  if (!fs::is_regular_file(gt_path)) throw DataError(gt_path.string() + ": missing ground-truth file");
  const auto gt_lines = read_lines(gt_path);
  std::vector<BBox> gt;
  gt.reserve(gt_lines.size());
  for (std::size_t i = 0; i < gt_lines.size(); ++i) {
    gt.push_back(parse_box_row(gt_lines[i], gt_path.string(), i + 1));
  }
  if (gt.size() != frames.size()) {
    throw DataError(gt_path.string() + ": row-count mismatch: " +
                    std::to_string(gt.size()) + " rows for " +
                    std::to_string(frames.size()) + " frames");
  }

  std::vector<bool> absent(frames.size());
  for (std::size_t i = 0; i < gt.size(); ++i) absent[i] = gt[i].degenerate();
  for (const auto& name : layout.absence_files) {
    const fs::path p = dir / name;
    if (!fs::is_regular_file(p)) continue;
    const auto flags = read_absence_flags(p, frames.size());
    for (std::size_t i = 0; i < flags.size(); ++i) absent[i] = absent[i] || flags[i];
  }

  const fs::path lang_path = dir / layout.language_file;
  if (!fs::is_regular_file(lang_path)) throw DataError(lang_path.string() + ": missing language file");
  const auto lang_lines = read_lines(lang_path);
  seq.description = lang_lines.empty() ? std::string{} : trim(lang_lines.front());
  if (seq.description.empty()) throw DataError(lang_path.string() + ":1: empty description");

  const cv::Mat first = cv::imread(frames.front().string(), cv::IMREAD_COLOR);
  if (first.empty()) throw DataError(frames.front().string() + ": unreadable frame");

  seq.frames = std::move(frames);
  seq.groundtruth = std::move(gt);
  seq.absent = std::move(absent);
  seq.image_size = ImageSize::of(first);
  seq.validate();
  return seq;
}

SplitLoad load_split(const fs::path& root, const LayoutConfig& layout) {
  if (!fs::is_directory(root)) throw DataError(root.string() + ": not a directory");
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  if (dirs.empty()) throw DataError(root.string() + ": no sequences");
  std::sort(dirs.begin(), dirs.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  SplitLoad out;
  for (const auto& d : dirs) {
    try {
      out.sequences.push_back(load_sequence(d, layout));
    } catch (const std::exception& e) {
      out.failures.push_back({d.filename().string(), e.what()});
    }
  }
  return out;
}

std::string format_results(const ResultTrack& track) {
  std::string out;
  char buf[160];
  for (const auto& b : track.boxes) {
    std::snprintf(buf, sizeof buf, "%.2f,%.2f,%.2f,%.2f\n", b.x, b.y, b.w, b.h);
    out += buf;
  }
  return out;
}

void write_results(const ResultTrack& track, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(path.string() + ": cannot write results");
  out << format_results(track);
  if (!out) throw DataError(path.string() + ": write failed");
}

ResultTrack read_results(const fs::path& path, std::string sequence_name) {
  if (!fs::is_regular_file(path)) throw DataError(path.string() + ": missing results file");
  const auto lines = read_lines(path);
  ResultTrack track{std::move(sequence_name), {}};
  track.boxes.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const BBox b = parse_box_row(lines[i], path.string(), i + 1);
    track.boxes.push_back(b);
  }
  return track;
}

}  // namespace vltrack
