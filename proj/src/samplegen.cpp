#include "vltrack/samplegen.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <stdexcept>

#include <opencv2/imgcodecs.hpp>

#include "json.hpp"
#include "vltrack/localizer.hpp"
#include "vltrack/tracker.hpp"

namespace vltrack {

using nlohmann::ordered_json;

namespace {

constexpr std::string_view kSystemPrompt =
    "You are a visual object tracker. Given a target template, a language "
    "description and the current frame, you report the target's bounding box.";

double uniform(SampleRng& rng, double lo, double hi) {
  if (!(hi > lo)) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t uniform_index(SampleRng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

double gaussian(SampleRng& rng, double sigma) {
  if (!(sigma > 0.0)) return 0.0;
  return std::normal_distribution<double>(0.0, sigma)(rng);
}

// Clamped ground truth, round-tripped through the answer grammar.
std::optional<std::pair<std::string, BBox>> label_for(const BBox& gt, ImageSize size) {
  const BBox clamped = clamp_to(gt, size);
  if (clamped.degenerate()) return std::nullopt;
  std::string text = format_box(clamped);
  const auto parsed = parse_box(text, size);
  if (!parsed) return std::nullopt;
  return std::make_pair(std::move(text), *parsed);
}

BBox jitter_box(const BBox& base, const JitterConfig& j, ImageSize size, SampleRng& rng) {
  for (int attempt = 0; attempt < 10; ++attempt) {
    const double cx = base.cx() + gaussian(rng, j.center_sigma * base.w);
    const double cy = base.cy() + gaussian(rng, j.center_sigma * base.h);
    const double w = base.w * uniform(rng, j.scale_min, j.scale_max);
    const double h = base.h * uniform(rng, j.scale_min, j.scale_max);
    BBox b{cx - w / 2.0, cy - h / 2.0, w, h};
    if (j.center_sigma == 0.0 && j.scale_min == 1.0 && j.scale_max == 1.0) b = base;
    b = clamp_to(b, size);
    if (!b.degenerate()) return b;
  }
  return clamp_to(base, size);
}

std::optional<BBox> place_negative(const BBox& target, const GenConfig& cfg, ImageSize size,
                                   SampleRng& rng) {
  const auto& j = cfg.jitter;
  const double w = std::min(target.w * uniform(rng, j.scale_min, j.scale_max),
                            static_cast<double>(size.width));
  const double h = std::min(target.h * uniform(rng, j.scale_min, j.scale_max),
                            static_cast<double>(size.height));
  for (int attempt = 0; attempt < cfg.max_rejection_attempts; ++attempt) {
    const BBox candidate{uniform(rng, 0.0, size.width - w), uniform(rng, 0.0, size.height - h),
                         w, h};
    const BBox drawn = enlarge(candidate, cfg.prompt_style.enlarge_factor, size);
    // The drawn (enlarged) rectangle must miss the target too.
    if (iou(candidate, target) == 0.0 && iou(drawn, target) == 0.0) return candidate;
  }
  return std::nullopt;
}

ordered_json box_json(const BBox& b) { return ordered_json::array({b.x, b.y, b.w, b.h}); }

}  // namespace

std::string_view to_string(SourceDataset d) {
  return d == SourceDataset::tnl2k ? "tnl2k" : "tnllt";
}

void GenConfig::validate() const {
  if (!(mix_ratio >= 0.0 && mix_ratio <= 1.0)) throw std::invalid_argument("mix ratio must be in [0, 1]");
  if (!(negative_fraction >= 0.0 && negative_fraction <= 1.0)) {
    throw std::invalid_argument("negative fraction must be in [0, 1]");
  }
  if (max_temporal_gap < 1) throw std::invalid_argument("max temporal gap must be >= 1");
  if (!(jitter.center_sigma >= 0.0)) throw std::invalid_argument("center sigma must be >= 0");
  if (!(jitter.scale_min > 0.0 && jitter.scale_min <= jitter.scale_max)) {
    throw std::invalid_argument("scale range must satisfy 0 < min <= max");
  }
  if (max_rejection_attempts < 1) throw std::invalid_argument("rejection attempts must be >= 1");
  prompt_style.validate();
}

SamplePool::SamplePool(std::vector<Sequence> tnl2k, std::vector<Sequence> tnllt)
    : sequences_{std::move(tnl2k), std::move(tnllt)} {
  for (int d = 0; d < 2; ++d) {
    for (const auto& seq : sequences_[d]) {
      std::vector<std::size_t> idx;
      for (std::size_t t = 1; t < seq.size(); ++t) {
        if (!seq.absent[t] && label_for(seq.groundtruth[t], seq.image_size)) idx.push_back(t);
      }
      eligible_[d].push_back(std::move(idx));
    }
  }
}

SampleRecord draw_sample(const SamplePool& pool, const GenConfig& cfg, SampleRng& rng) {
  SampleRecord r;
  const bool from_tnl2k = uniform(rng, 0.0, 1.0) < cfg.mix_ratio;
  r.source_dataset = from_tnl2k ? SourceDataset::tnl2k : SourceDataset::tnllt;
  const auto& seqs = pool.sequences(r.source_dataset);

  bool any_eligible = false;
  for (std::size_t i = 0; i < seqs.size() && !any_eligible; ++i) {
    any_eligible = !pool.eligible(r.source_dataset, i).empty();
  }
  if (!any_eligible) {
    throw std::invalid_argument(std::string(to_string(r.source_dataset)) +
                                ": no sequence has two or more present frames");
  }
  // Resample sequences lacking a usable search frame.
  do {
    r.sequence_index = uniform_index(rng, seqs.size());
  } while (pool.eligible(r.source_dataset, r.sequence_index).empty());

  const Sequence& seq = seqs[r.sequence_index];
  const auto& eligible = pool.eligible(r.source_dataset, r.sequence_index);
  const std::size_t search = eligible[uniform_index(rng, eligible.size())];
  r.sequence_name = seq.name;
  r.template_frame_index = 1;
  r.search_frame_index = search + 1;

  auto label = label_for(seq.groundtruth[search], seq.image_size);
  r.target_text = std::move(label->first);
  r.target_box = label->second;

  const bool negative = uniform(rng, 0.0, 1.0) < cfg.negative_fraction;
  if (negative) {
    r.prompt_box = place_negative(r.target_box, cfg, seq.image_size, rng);
    r.is_negative_prompt = r.prompt_box.has_value();
    r.negative_fallback = !r.prompt_box.has_value();
  }
  if (!r.prompt_box) {
    const auto gap = std::uniform_int_distribution<int>(1, cfg.max_temporal_gap)(rng);
    std::size_t prev = search > static_cast<std::size_t>(gap) ? search - gap : 0;
    while (prev > 0 && (seq.absent[prev] || seq.groundtruth[prev].degenerate())) --prev;
    r.prompt_box = jitter_box(seq.groundtruth[prev], cfg.jitter, seq.image_size, rng);
  }

  r.instruction = build_instruction(cfg.instruction_template, seq.description, true);
  return r;
}

std::string manifest_line(const SampleRecord& r, const std::optional<PixelRect>& drawn) {
  ordered_json j;
  j["schema"] = "vltrack.sample/1";
  j["id"] = r.sample_id;
  j["source_dataset"] = to_string(r.source_dataset);
  j["sequence"] = r.sequence_name;
  j["template_frame"] = r.template_frame_index;
  j["search_frame"] = r.search_frame_index;
  j["prompt_box"] = r.prompt_box ? box_json(*r.prompt_box) : ordered_json(nullptr);
  j["drawn_rect"] = drawn ? ordered_json::array({drawn->x0, drawn->y0, drawn->x1, drawn->y1})
                          : ordered_json(nullptr);
  j["target_box"] = box_json(r.target_box);
  j["negative_prompt"] = r.is_negative_prompt;
  j["negative_fallback"] = r.negative_fallback;
  j["images"]["template"] = r.template_image_path;
  j["images"]["search"] = r.prompted_image_path;

  ordered_json system{{"role", "system"}, {"content", kSystemPrompt}};
  ordered_json user;
  user["role"] = "user";
  user["content"] = ordered_json::array(
      {ordered_json{{"type", "text"}, {"text", r.instruction}},
       ordered_json{{"type", "image"}, {"image", r.template_image_path}},
       ordered_json{{"type", "image"}, {"image", r.prompted_image_path}}});
  ordered_json assistant{{"role", "assistant"}, {"content", r.target_text}};
  j["messages"] = ordered_json::array({system, user, assistant});
  return j.dump();
}

GenSummary generate(const GenConfig& cfg, const GenInputs& inputs, const fs::path& out_dir) {
  cfg.validate();
  auto load = [](const fs::path& root, const LayoutConfig& layout) {
    auto split = load_split(root, layout);
    if (!split.failures.empty()) {
      std::string msg = root.string() + ": " + std::to_string(split.failures.size()) +
                        " sequence(s) failed to load:";
      for (const auto& f : split.failures) msg += "\n  " + f.sequence + ": " + f.reason;
      throw DataError(msg);
    }
    return std::move(split.sequences);
  };
  SamplePool pool(load(inputs.tnl2k_root, inputs.tnl2k_layout),
                  load(inputs.tnllt_root, inputs.tnllt_layout));
  return generate(cfg, pool, out_dir);
}

GenSummary generate(const GenConfig& cfg, const SamplePool& pool, const fs::path& out_dir) {
  cfg.validate();
  std::error_code ec;
  fs::create_directories(out_dir / "images", ec);
  if (ec) throw DataError(out_dir.string() + ": cannot create output directory: " + ec.message());

  GenSummary summary;
  summary.manifest_path = out_dir / "manifest.jsonl";
  std::ofstream manifest(summary.manifest_path, std::ios::binary | std::ios::trunc);
  if (!manifest) throw DataError(summary.manifest_path.string() + ": cannot write");

  const std::vector<int> png_params = {cv::IMWRITE_PNG_COMPRESSION, 3};
  std::map<std::pair<int, std::size_t>, cv::Mat> templates;
  SampleRng rng(cfg.seed);

  for (std::size_t i = 0; i < cfg.total_count; ++i) {
    SampleRecord r = draw_sample(pool, cfg, rng);
    char id[32];
    std::snprintf(id, sizeof id, "%07zu", i);
    r.sample_id = id;
    r.template_image_path = "images/" + r.sample_id + "_template.png";
    r.prompted_image_path = "images/" + r.sample_id + "_search.png";

    const Sequence& seq = pool.sequences(r.source_dataset)[r.sequence_index];
    const auto key = std::make_pair(static_cast<int>(r.source_dataset), r.sequence_index);
    auto it = templates.find(key);
    if (it == templates.end()) {
      it = templates
               .emplace(key, extract_template(read_frame(seq.frames.front()),
                                              seq.groundtruth.front()))
               .first;
    }
    const cv::Mat search = read_frame(seq.frames[r.search_frame_index - 1]);
    const cv::Mat prompted = render_prompt(search, *r.prompt_box, cfg.prompt_style);
    const PixelRect rect = prompt_region(*r.prompt_box, cfg.prompt_style, ImageSize::of(search));
    const std::optional<PixelRect> drawn =
        rect.empty() ? std::nullopt : std::optional<PixelRect>(rect);

    if (!cv::imwrite((out_dir / r.template_image_path).string(), it->second, png_params) ||
        !cv::imwrite((out_dir / r.prompted_image_path).string(), prompted, png_params)) {
      throw DataError(out_dir.string() + ": failed to write images for sample " + r.sample_id);
    }
    manifest << manifest_line(r, drawn) << "\n";

    ++summary.count;
    ++summary.per_dataset[static_cast<int>(r.source_dataset)];
    if (r.is_negative_prompt) ++summary.negatives;
    if (r.negative_fallback) {
      ++summary.negative_fallbacks;
      std::cerr << "sample " << r.sample_id << ": no disjoint negative prompt in "
                << cfg.max_rejection_attempts << " attempts, kept as positive\n";
    }
  }
  if (!manifest) throw DataError(summary.manifest_path.string() + ": write failed");
  return summary;
}

}  // namespace vltrack
