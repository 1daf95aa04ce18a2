#include "vltrack/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include <opencv2/imgcodecs.hpp>

namespace vltrack {
namespace {

cv::Mat background(ImageSize size, std::uint64_t seed) {
  cv::Mat img(size.height, size.width, CV_8UC3);
  const int phase = static_cast<int>(seed % 97);
  for (int y = 0; y < size.height; ++y) {
    auto* row = img.ptr<cv::Vec3b>(y);
    for (int x = 0; x < size.width; ++x) {
      const int checker = ((x / 8) + (y / 8)) % 2 ? 12 : 0;
      row[x] = cv::Vec3b(static_cast<uchar>(60 + (x + phase) % 64 + checker),
                         static_cast<uchar>(80 + (y * 2 + phase) % 48),
                         static_cast<uchar>(40 + (x + y) % 32));
    }
  }
  return img;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(path.string() + ": cannot write");
  out << text;
}

}  // namespace

std::vector<BBox> write_synthetic_sequence(const fs::path& dir, const LayoutConfig& layout,
                                           const SyntheticSpec& spec) {
  const fs::path img_dir = dir / layout.image_dir;
  fs::create_directories(img_dir);
  const cv::Mat bg = background(spec.size, spec.seed);
  const std::string ext = layout.extensions.empty() ? ".png" : layout.extensions.front();
  const std::string frame_ext = (ext == ".png" || ext == ".bmp") ? ext : ".png";

  std::vector<BBox> gt;
  std::vector<bool> hidden;
  double x = spec.start.x, y = spec.start.y;
  double vx = spec.vx, vy = spec.vy;
  for (std::size_t t = 1; t <= spec.n_frames; ++t) {
    const BBox box{std::round(x), std::round(y), spec.start.w, spec.start.h};
    const bool is_hidden = spec.absent_from > 0 && t >= spec.absent_from && t <= spec.absent_to;
    cv::Mat frame = bg.clone();
    if (!is_hidden) {
      const PixelRect r = pixel_region(box, spec.size);
      frame(r.to_cv()).setTo(cv::Scalar(30, 30, 230));
      const int inset = std::max(1, r.width() / 4);
      if (r.width() > 2 * inset && r.height() > 2 * inset) {
        frame(cv::Rect(r.x0 + inset, r.y0 + inset, r.width() - 2 * inset,
                       r.height() - 2 * inset))
            .setTo(cv::Scalar(240, 240, 240));
      }
    }
    cv::imwrite((img_dir / (std::to_string(t) + frame_ext)).string(), frame);
    gt.push_back(is_hidden ? BBox{} : box);
    hidden.push_back(is_hidden);

    x += vx;
    y += vy;
    if (x < 0 || x + spec.start.w > spec.size.width) {
      vx = -vx;
      x += 2 * vx;
    }
    if (y < 0 || y + spec.start.h > spec.size.height) {
      vy = -vy;
      y += 2 * vy;
    }
  }

  std::string rows;
  char buf[128];
  for (const auto& b : gt) {
    std::snprintf(buf, sizeof buf, "%g,%g,%g,%g\n", b.x, b.y, b.w, b.h);
    rows += buf;
  }
  write_text(dir / layout.groundtruth_file, rows);
  write_text(dir / layout.language_file, spec.description + "\n");
  if (!layout.absence_files.empty()) {
    std::string flags;
    for (std::size_t i = 0; i < hidden.size(); ++i) {
      flags += (i ? "," : "");
      flags += hidden[i] ? "1" : "0";
    }
    write_text(dir / layout.absence_files.front(), flags + "\n");
  }
  return gt;
}

void write_synthetic_split(const fs::path& root, const LayoutConfig& layout, std::size_t count,
                           std::size_t n_frames, std::uint64_t seed) {
  static const char* kColors[] = {"red and white square", "small red box", "red tile"};
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    SyntheticSpec spec;
    char name[32];
    std::snprintf(name, sizeof name, "seq_%03zu", i);
    spec.name = name;
    spec.description = std::string("the ") + kColors[i % 3] + " moving across the scene";
    spec.n_frames = n_frames;
    spec.seed = seed + i;
    spec.start = {static_cast<double>(10 + rng() % 60), static_cast<double>(10 + rng() % 50),
                  static_cast<double>(16 + rng() % 16), static_cast<double>(14 + rng() % 12)};
    spec.vx = static_cast<double>(static_cast<int>(rng() % 9) - 4);
    spec.vy = static_cast<double>(static_cast<int>(rng() % 7) - 3);
    if (i % 3 == 2 && n_frames >= 6) {
      spec.absent_from = n_frames / 2;
      spec.absent_to = n_frames / 2 + 1;
    }
    write_synthetic_sequence(root / spec.name, layout, spec);
  }
}

}  // namespace vltrack
