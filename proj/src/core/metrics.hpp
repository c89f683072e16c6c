#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "core/geometry.hpp"
#include "core/oracle.hpp"
#include "core/xmap.hpp"

namespace xmaps {

// Dense per-pixel depth in meters on the rectified camera grid; NaN marks
// undefined cells.
class DepthImage {
 public:
  DepthImage(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  bool defined(int x, int y) const { return !std::isnan(values_[index(x, y)]); }
  float at(int x, int y) const { return values_[index(x, y)]; }
  void set(int x, int y, float meters) { values_[index(x, y)] = meters; }
  size_t index(int x, int y) const { return size_t(y) * size_t(width_) + size_t(x); }
  std::span<const float> values() const { return values_; }
  std::span<float> values() { return values_; }
  size_t defined_count() const;

 private:
  int width_, height_;
  std::vector<float> values_;
};

// Deterministic rasterization of per-event depth: the nearest (smallest)
// depth wins per pixel.
DepthImage render_depth_image(const DepthFrame& frame, int width, int height);

// Depth per defined cell of a disparity map; cells with d <= 0 stay
// undefined (no depth exists for them).
DepthImage depth_image_from_disparities(const DisparityMap& map,
                                        const StereoCalibration& calib);

// Root-mean-square depth difference over cells defined in both images, in
// centimeters. Throws when the defined regions do not intersect.
double rmse_cm(const DepthImage& estimate, const DepthImage& reference);

// Fraction of reference-defined cells whose estimate exists and lies within
// 1 % of the mean reference depth.
double fill_rate(const DepthImage& estimate, const DepthImage& reference);

// Total-least-squares plane fit; RMSE of point-to-plane distances in
// centimeters. Throws for fewer than 3 points or a collinear set.
double plane_fit_rmse_cm(std::span<const Vec3> points);

// Back-projects every retained event of a depth frame.
std::vector<Vec3> depth_frame_points(const DepthFrame& frame, const StereoCalibration& calib);

struct EvalReport {
  double rmse_cm = 0;
  double fill_rate = 0;
  size_t n_compared = 0;
  double mean_scene_depth_m = 0;
  std::optional<double> plane_fit_rmse_cm;
  std::array<size_t, 4> discard_counts{};  // indexed by DiscardReason
};

// Assembles the evaluation summary of an estimated depth image against a
// reference; `frame` (when given) contributes discard accounting and the
// plane-fit residual of its point cloud.
EvalReport evaluate(const DepthImage& estimate, const DepthImage& reference,
                    const DepthFrame* frame = nullptr,
                    const StereoCalibration* calib = nullptr);

}  // namespace xmaps
