#pragma once

#include <stdexcept>
#include <string>

#include <opencv2/core.hpp>

namespace vltrack {

/// Raised for precondition violations on box arithmetic (degenerate input
/// where a real box is required, empty crops).
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Axis-aligned box in pixel coordinates: origin top-left, x rightward,
/// y downward. A box with zero width or height is degenerate and stands for
/// an absent target.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  static BBox from_corners(double x1, double y1, double x2, double y2);

  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double cx() const { return x + w / 2.0; }
  double cy() const { return y + h / 2.0; }
  double area() const { return w * h; }
  bool degenerate() const { return !(w > 0.0) || !(h > 0.0); }

  friend bool operator==(const BBox&, const BBox&) = default;
};

struct ImageSize {
  int width = 0;
  int height = 0;

  static ImageSize of(const cv::Mat& image) { return {image.cols, image.rows}; }
  bool valid() const { return width >= 1 && height >= 1; }
  int max_side() const { return width > height ? width : height; }

  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

/// Integer pixel rectangle [x0, x1) x [y0, y1).
struct PixelRect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  bool empty() const { return x1 <= x0 || y1 <= y0; }
  cv::Rect to_cv() const { return {x0, y0, width(), height()}; }

  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

/// Intersection over union. Zero whenever either box is degenerate.
double iou(const BBox& a, const BBox& b);

/// Euclidean distance between box centers. Throws GeometryError on a
/// degenerate box.
double center_error(const BBox& a, const BBox& b);

/// Center offset normalized per-axis by the ground-truth extent. Only `gt`
/// must be non-degenerate.
double normalized_center_error(const BBox& pred, const BBox& gt);

/// Intersection of `b` with the image rectangle [0,width] x [0,height].
/// Returns a degenerate box when nothing overlaps.
BBox clamp_to(const BBox& b, ImageSize bounds);

/// Same center, dimensions scaled by `factor`, then clamped to `bounds`.
BBox enlarge(const BBox& b, double factor, ImageSize bounds);

/// Snap to the pixel grid (floor origin, ceil far edge) and clamp to bounds.
PixelRect pixel_region(const BBox& b, ImageSize bounds);

/// Deep copy of the pixels covered by pixel_region(b). Throws GeometryError
/// ("empty crop") when the region is empty.
cv::Mat crop(const cv::Mat& image, const BBox& b);

std::string to_string(const BBox& b);

}  // namespace vltrack
