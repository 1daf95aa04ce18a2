#pragma once

// Brute-force reference computations used by the unit and acceptance tests.
// They deliberately avoid the library's code paths.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include <opencv2/core.hpp>

#include "vltrack/geometry.hpp"

namespace vltrack::oracle {

struct Areas {
  double intersection = 0.0;
  double uni = 0.0;
};

// Coordinate compression: split the plane along every box edge and add up the
// cells covered by both boxes (intersection) and by either (union).
inline Areas cell_areas(const BBox& a, const BBox& b) {
  std::array<double, 4> xs{a.x, a.x + a.w, b.x, b.x + b.w};
  std::array<double, 4> ys{a.y, a.y + a.h, b.y, b.y + b.h};
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  auto inside = [](const BBox& r, double px, double py) {
    return px > r.x && px < r.x + r.w && py > r.y && py < r.y + r.h;
  };
  Areas out;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double cw = xs[i + 1] - xs[i];
      const double ch = ys[j + 1] - ys[j];
      if (cw <= 0 || ch <= 0) continue;
      const double px = (xs[i] + xs[i + 1]) / 2;
      const double py = (ys[j] + ys[j + 1]) / 2;
      const bool in_a = inside(a, px, py);
      const bool in_b = inside(b, px, py);
      if (in_a && in_b) out.intersection += cw * ch;
      if (in_a || in_b) out.uni += cw * ch;
    }
  }
  return out;
}

inline double iou(const BBox& a, const BBox& b) {
  if (a.w <= 0 || a.h <= 0 || b.w <= 0 || b.h <= 0) return 0.0;
  const Areas ar = cell_areas(a, b);
  return ar.uni > 0 ? ar.intersection / ar.uni : 0.0;
}

inline double center_error(const BBox& a, const BBox& b) {
  const double ax = (a.x + (a.x + a.w)) / 2, ay = (a.y + (a.y + a.h)) / 2;
  const double bx = (b.x + (b.x + b.w)) / 2, by = (b.y + (b.y + b.h)) / 2;
  return std::sqrt((ax - bx) * (ax - bx) + (ay - by) * (ay - by));
}

inline double normalized_center_error(const BBox& p, const BBox& g) {
  const double dx = ((p.x + (p.x + p.w)) / 2 - (g.x + (g.x + g.w)) / 2) / g.w;
  const double dy = ((p.y + (p.y + p.h)) / 2 - (g.y + (g.y + g.h)) / 2) / g.h;
  return std::sqrt(dx * dx + dy * dy);
}

// Metric recounts: for every threshold, walk every frame.

struct Recount {
  std::vector<double> curve;
  double value = 0.0;
  std::size_t n = 0;
};

inline bool evaluated(const BBox& gt, bool absent) { return !absent && gt.w > 0 && gt.h > 0; }

inline Recount success(const std::vector<BBox>& preds, const std::vector<BBox>& gts,
                       const std::vector<bool>& absent) {
  Recount r;
  for (std::size_t f = 0; f < gts.size(); ++f) r.n += evaluated(gts[f], absent[f]);
  double sum = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const double tau = i / 20.0;
    std::size_t hits = 0;
    for (std::size_t f = 0; f < gts.size(); ++f) {
      if (evaluated(gts[f], absent[f]) && vltrack::iou(preds[f], gts[f]) >= tau) ++hits;
    }
    r.curve.push_back(static_cast<double>(hits) / static_cast<double>(r.n));
    sum += r.curve.back();
  }
  r.value = sum / 21.0;
  return r;
}

inline double safe_center_error(const BBox& p, const BBox& g) {
  if (p.w <= 0 || p.h <= 0) return INFINITY;
  return vltrack::center_error(p, g);
}

inline Recount precision(const std::vector<BBox>& preds, const std::vector<BBox>& gts,
                         const std::vector<bool>& absent) {
  Recount r;
  for (std::size_t f = 0; f < gts.size(); ++f) r.n += evaluated(gts[f], absent[f]);
  for (int px = 0; px <= 50; ++px) {
    std::size_t hits = 0;
    for (std::size_t f = 0; f < gts.size(); ++f) {
      if (evaluated(gts[f], absent[f]) && safe_center_error(preds[f], gts[f]) <= px) ++hits;
    }
    r.curve.push_back(static_cast<double>(hits) / static_cast<double>(r.n));
  }
  r.value = r.curve[20];
  return r;
}

inline Recount normalized_precision(const std::vector<BBox>& preds, const std::vector<BBox>& gts,
                                    const std::vector<bool>& absent) {
  Recount r;
  for (std::size_t f = 0; f < gts.size(); ++f) r.n += evaluated(gts[f], absent[f]);
  double sum = 0.0;
  for (int i = 0; i <= 50; ++i) {
    const double theta = i / 100.0;
    std::size_t hits = 0;
    for (std::size_t f = 0; f < gts.size(); ++f) {
      if (!evaluated(gts[f], absent[f])) continue;
      const BBox& p = preds[f];
      const double e = (p.w <= 0 || p.h <= 0) ? INFINITY
                                              : vltrack::normalized_center_error(p, gts[f]);
      if (e <= theta) ++hits;
    }
    r.curve.push_back(static_cast<double>(hits) / static_cast<double>(r.n));
    sum += r.curve.back();
  }
  r.value = sum / 51.0;
  return r;
}

// Per-pixel membership in the stroked outline band of integer rect
// [x0,x1) x [y0,y1) with stroke width t drawn inward.
inline bool in_outline_band(int px, int py, const PixelRect& r, int t) {
  if (px < r.x0 || px >= r.x1 || py < r.y0 || py >= r.y1) return false;
  return px < r.x0 + t || px >= r.x1 - t || py < r.y0 + t || py >= r.y1 - t;
}

// Integer rect a prompt should occupy: enlarged box around the same center,
// clamped, floor/ceil snapped. Written out longhand.
inline PixelRect expected_prompt_rect(const BBox& b, double factor, int width, int height) {
  double x0 = b.x, y0 = b.y, x1 = b.x + b.w, y1 = b.y + b.h;
  if (factor != 1.0) {
    const double cx = b.x + b.w / 2, cy = b.y + b.h / 2;
    x0 = cx - b.w * factor / 2;
    x1 = x0 + b.w * factor;
    y0 = cy - b.h * factor / 2;
    y1 = y0 + b.h * factor;
  }
  x0 = std::max(0.0, x0);
  y0 = std::max(0.0, y0);
  x1 = std::min<double>(width, x1);
  y1 = std::min<double>(height, y1);
  if (x1 <= x0 || y1 <= y0) return {};
  PixelRect r{static_cast<int>(std::floor(x0)), static_cast<int>(std::floor(y0)),
              static_cast<int>(std::ceil(x1)), static_cast<int>(std::ceil(y1))};
  r.x1 = std::min(r.x1, width);
  r.y1 = std::min(r.y1, height);
  return r;
}

}  // namespace vltrack::oracle
