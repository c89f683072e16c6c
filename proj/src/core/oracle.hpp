#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "core/events.hpp"
#include "core/geometry.hpp"
#include "core/timemap.hpp"
#include "core/trigger.hpp"
#include "core/xmap.hpp"

namespace xmaps {

// Per-cell disparity on the rectified camera grid; NaN marks undefined.
class DisparityMap {
 public:
  DisparityMap(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  bool defined(int x, int y) const { return !std::isnan(values_[index(x, y)]); }
  float at(int x, int y) const { return values_[index(x, y)]; }
  void set(int x, int y, float d) { values_[index(x, y)] = d; }
  size_t index(int x, int y) const { return size_t(y) * size_t(width_) + size_t(x); }
  std::span<const float> values() const { return values_; }

 private:
  int width_, height_;
  std::vector<float> values_;
};

// Rasterizes rectified event coordinates into a camera-grid time map (first
// event per cell wins), for feeding the row-wise search below.
TimeMap rasterize_rectified_time_map(std::span<const Event> events, const FrameSlice& frame,
                                     const RectifyMap& camera_rectify, int width,
                                     int height);

// Row-wise brute-force disparity search on rectified time maps: per defined
// camera cell, the d in [0, max_disparity] minimizing the time difference to
// the projector map at x + d on the same row. Ties break toward the smallest
// d. Serves as the correctness oracle for the X-map lookup path.
DisparityMap esl_init_search(const TimeMap& camera_map, const TimeMap& projector_map,
                             int max_disparity);

struct CompareStats {
  size_t n_compared = 0;  // events landing on defined map cells
  size_t n_matched = 0;
  double fraction = std::numeric_limits<double>::quiet_NaN();  // NaN: no overlap
  std::map<int, size_t> histogram;  // integer-binned disparity differences

  bool comparable() const { return n_compared > 0; }
};

// Fraction of depth-frame events whose disparity matches the map cell under
// their rounded rectified coordinates within tol_px.
CompareStats compare_disparities(const DepthFrame& frame, const DisparityMap& map,
                                 double tol_px);

}  // namespace xmaps
