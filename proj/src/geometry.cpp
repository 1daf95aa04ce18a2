#include "vltrack/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace vltrack {

BBox BBox::from_corners(double x1, double y1, double x2, double y2) {
  return {std::min(x1, x2), std::min(y1, y2), std::abs(x2 - x1),
          std::abs(y2 - y1)};
}

double iou(const BBox& a, const BBox& b) {
  if (a.degenerate() || b.degenerate()) return 0.0;
  const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  // Areas from corner differences, like the intersection, so iou(a, a) == 1
  // exactly.
  const double area_a = (a.right() - a.x) * (a.bottom() - a.y);
  const double area_b = (b.right() - b.x) * (b.bottom() - b.y);
  const double inter = iw * ih;
  const double uni = area_a + area_b - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double center_error(const BBox& a, const BBox& b) {
  if (a.degenerate() || b.degenerate()) {
    throw GeometryError("center_error on degenerate box");
  }
  return std::hypot(a.cx() - b.cx(), a.cy() - b.cy());
}

double normalized_center_error(const BBox& pred, const BBox& gt) {
  if (gt.degenerate()) {
    throw GeometryError("normalized_center_error with degenerate ground truth");
  }
  return std::hypot((pred.cx() - gt.cx()) / gt.w, (pred.cy() - gt.cy()) / gt.h);
}

BBox clamp_to(const BBox& b, ImageSize bounds) {
  if (!b.degenerate() && b.x >= 0 && b.y >= 0 && b.right() <= bounds.width &&
      b.bottom() <= bounds.height) {
    return b;
  }
  const double x0 = std::clamp(b.x, 0.0, static_cast<double>(bounds.width));
  const double y0 = std::clamp(b.y, 0.0, static_cast<double>(bounds.height));
  const double x1 = std::clamp(b.right(), 0.0, static_cast<double>(bounds.width));
  const double y1 = std::clamp(b.bottom(), 0.0, static_cast<double>(bounds.height));
  if (x1 <= x0 || y1 <= y0) return BBox{};
  return {x0, y0, x1 - x0, y1 - y0};
}

BBox enlarge(const BBox& b, double factor, ImageSize bounds) {
  if (!(factor > 0.0)) throw GeometryError("enlarge factor must be positive");
  if (b.degenerate()) return BBox{};
  if (factor == 1.0) return clamp_to(b, bounds);
  const double w = b.w * factor;
  const double h = b.h * factor;
  return clamp_to({b.cx() - w / 2.0, b.cy() - h / 2.0, w, h}, bounds);
}

PixelRect pixel_region(const BBox& b, ImageSize bounds) {
  if (b.degenerate()) return {};
  auto snap = [](double v, int hi) {
    return static_cast<int>(std::clamp(v, 0.0, static_cast<double>(hi)));
  };
  PixelRect r{snap(std::floor(b.x), bounds.width),
              snap(std::floor(b.y), bounds.height),
              snap(std::ceil(b.right()), bounds.width),
              snap(std::ceil(b.bottom()), bounds.height)};
  if (r.empty()) return {};
  return r;
}

cv::Mat crop(const cv::Mat& image, const BBox& b) {
  const PixelRect r = pixel_region(b, ImageSize::of(image));
  if (image.empty() || r.empty()) throw GeometryError("empty crop");
  return image(r.to_cv()).clone();
}

std::string to_string(const BBox& b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "(%g, %g, %g, %g)", b.x, b.y, b.w, b.h);
  return buf;
}

}  // namespace vltrack
