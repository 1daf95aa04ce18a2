#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "vltrack/dataset.hpp"
#include "vltrack/geometry.hpp"
#include "vltrack/prompting.hpp"

namespace vltrack {

enum class SourceDataset { tnl2k = 0, tnllt = 1 };

std::string_view to_string(SourceDataset d);

struct JitterConfig {
  /// Std-dev of the center offset, relative to box width/height.
  double center_sigma = 0.1;
  /// Per-axis scale factor drawn uniformly from [scale_min, scale_max].
  double scale_min = 0.8;
  double scale_max = 1.25;
};

struct GenConfig {
  std::size_t total_count = 1000;
  /// Probability a sample is drawn from the TNL2K pool.
  double mix_ratio = 0.7;
  double negative_fraction = 0.2;
  int max_temporal_gap = 30;
  JitterConfig jitter;
  std::uint64_t seed = 0;
  int max_rejection_attempts = 100;
  PromptStyle prompt_style;
  InstructionTemplate instruction_template = InstructionTemplate::default_template();

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

struct SampleRecord {
  std::string sample_id;
  SourceDataset source_dataset = SourceDataset::tnl2k;
  std::string sequence_name;
  std::size_t sequence_index = 0;  // within its dataset pool
  std::size_t template_frame_index = 1;
  std::size_t search_frame_index = 0;  // 1-based
  std::optional<BBox> prompt_box;
  /// Target box in canonical label form: parse_box(target_text) == target_box.
  BBox target_box;
  std::string target_text;
  bool is_negative_prompt = false;
  /// A negative draw whose rejection sampling gave up and became positive.
  bool negative_fallback = false;
  std::string instruction;
  std::string template_image_path;
  std::string prompted_image_path;
};

/// Sequences of both datasets plus the per-sequence frames eligible as search
/// frames (present, index >= 2, in-frame ground truth).
class SamplePool {
 public:
  SamplePool(std::vector<Sequence> tnl2k, std::vector<Sequence> tnllt);

  const std::vector<Sequence>& sequences(SourceDataset d) const {
    return sequences_[static_cast<int>(d)];
  }
  /// 0-based eligible search-frame indices of one sequence.
  const std::vector<std::size_t>& eligible(SourceDataset d, std::size_t seq) const {
    return eligible_[static_cast<int>(d)][seq];
  }

 private:
  std::array<std::vector<Sequence>, 2> sequences_;
  std::array<std::vector<std::vector<std::size_t>>, 2> eligible_;
};

using SampleRng = std::mt19937_64;

/// Draws one sample description (no image I/O). Throws std::invalid_argument
/// if the chosen dataset has no sequence with an eligible search frame.
SampleRecord draw_sample(const SamplePool& pool, const GenConfig& cfg, SampleRng& rng);

struct GenInputs {
  fs::path tnl2k_root;
  fs::path tnllt_root;
  LayoutConfig tnl2k_layout = LayoutConfig::tnl2k();
  LayoutConfig tnllt_layout = LayoutConfig::tnllt();
};

struct GenSummary {
  std::size_t count = 0;
  std::size_t negatives = 0;
  std::size_t negative_fallbacks = 0;
  std::array<std::size_t, 2> per_dataset{};
  fs::path manifest_path;
};

/// One manifest line (schema "vltrack.sample/1") for a record.
std::string manifest_line(const SampleRecord& r, const std::optional<PixelRect>& drawn);

/// Draws cfg.total_count samples, writes the template crops and prompted
/// frames as PNG under out_dir/images and the manifest to
/// out_dir/manifest.jsonl. Dataset load failures throw DataError.
GenSummary generate(const GenConfig& cfg, const GenInputs& inputs, const fs::path& out_dir);

/// Same as above over already-loaded sequences.
GenSummary generate(const GenConfig& cfg, const SamplePool& pool, const fs::path& out_dir);

}  // namespace vltrack
