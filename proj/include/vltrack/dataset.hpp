#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "vltrack/geometry.hpp"

namespace vltrack {

namespace fs = std::filesystem;

/// Malformed or missing dataset/results input. The message carries the file
/// and, where applicable, the 1-based line number.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FrameOrder { natural, lexicographic };

/// On-disk conventions of a sequence directory.
///
/// Layout files are flat `key = value` documents; `#` starts a comment.
/// Recognized keys: name, image_dir, groundtruth, language, absence_files
/// (comma-separated), extensions (comma-separated, with dot), frame_order
/// (natural | lexicographic).
struct LayoutConfig {
  std::string name = "tnl2k";
  std::string image_dir = "imgs";
  std::string groundtruth_file = "groundtruth.txt";
  std::string language_file = "language.txt";
  std::vector<std::string> absence_files;
  std::vector<std::string> extensions = {".jpg", ".jpeg", ".png", ".bmp"};
  FrameOrder frame_order = FrameOrder::natural;

  static LayoutConfig tnl2k();
  static LayoutConfig tnllt();
  /// Accepts a preset name or a path to a layout file.
  static LayoutConfig resolve(const std::string& preset_or_path);
  static LayoutConfig parse(const std::string& text, const std::string& origin);
  static LayoutConfig load(const fs::path& file);

  std::string to_string() const;
};

struct Sequence {
  std::string name;
  std::vector<fs::path> frames;
  std::vector<BBox> groundtruth;
  std::vector<bool> absent;
  std::string description;
  ImageSize image_size;

  std::size_t size() const { return frames.size(); }
  /// Throws DataError if any structural invariant is broken.
  void validate() const;
};

struct ResultTrack {
  std::string sequence_name;
  std::vector<BBox> boxes;
};

struct LoadFailure {
  std::string sequence;
  std::string reason;
};

struct SplitLoad {
  std::vector<Sequence> sequences;
  std::vector<LoadFailure> failures;
};

/// Orders filenames by embedded numbers ("2.jpg" < "10.jpg").
bool natural_less(const std::string& a, const std::string& b);

/// Parses one "x,y,w,h" row (comma, tab or whitespace separated).
/// Throws DataError naming `origin` and `line_no`.
BBox parse_box_row(const std::string& line, const std::string& origin,
                   std::size_t line_no);

Sequence load_sequence(const fs::path& dir, const LayoutConfig& layout);

/// Loads every subdirectory of `root` in lexicographic order. Failing
/// sequences are listed in `failures`. Throws DataError when `root` holds no
/// sequence directories.
SplitLoad load_split(const fs::path& root, const LayoutConfig& layout);

/// One "x,y,w,h" line per frame with two decimals, LF terminated.
void write_results(const ResultTrack& track, const fs::path& path);
std::string format_results(const ResultTrack& track);
ResultTrack read_results(const fs::path& path, std::string sequence_name);

}  // namespace vltrack
