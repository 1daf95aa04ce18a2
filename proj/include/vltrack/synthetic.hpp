#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "vltrack/dataset.hpp"

namespace vltrack {

/// A target rectangle gliding over a textured background.
struct SyntheticSpec {
  std::string name = "seq";
  std::string description = "the red square";
  std::size_t n_frames = 10;
  ImageSize size{160, 120};
  BBox start{20, 30, 24, 18};
  double vx = 3.0;
  double vy = 1.5;
  /// 1-based inclusive frame span where the target is hidden; 0 disables.
  std::size_t absent_from = 0;
  std::size_t absent_to = 0;
  std::uint64_t seed = 1;
};

/// Writes frames (PNG), ground truth, language and, for layouts with
/// absence files, flag files into dir according to `layout`. Returns the
/// ground truth written.
std::vector<BBox> write_synthetic_sequence(const fs::path& dir, const LayoutConfig& layout,
                                           const SyntheticSpec& spec);

/// `count` sequences named seq_000, seq_001, ... with varied motion; every
/// third sequence contains an absent span.
void write_synthetic_split(const fs::path& root, const LayoutConfig& layout, std::size_t count,
                           std::size_t n_frames, std::uint64_t seed);

}  // namespace vltrack
