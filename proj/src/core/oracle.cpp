#include "core/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace xmaps {

DisparityMap::DisparityMap(int width, int height) : width_(width), height_(height) {
  require(width > 0 && height > 0, ErrorKind::invalid_argument,
          "disparity map dimensions must be positive");
  values_.assign(size_t(width) * size_t(height), std::numeric_limits<float>::quiet_NaN());
}

TimeMap rasterize_rectified_time_map(std::span<const Event> events, const FrameSlice& frame,
                                     const RectifyMap& camera_rectify, int width,
                                     int height) {
  require(frame.end_t_us > frame.start_t_us, ErrorKind::invalid_argument,
          "zero-span frame");
  TimeMap map(width, height);
  double span = double(frame.end_t_us - frame.start_t_us);
  for (const Event& e : events) {
    require(e.x < camera_rectify.width && e.y < camera_rectify.height,
            ErrorKind::dimension_mismatch, "event outside rectify map");
    if (!camera_rectify.defined(e.x, e.y)) continue;
    size_t idx = camera_rectify.index(e.x, e.y);
    int x = int(std::floor(double(camera_rectify.map_x[idx]) + 0.5));
    int y = int(std::floor(double(camera_rectify.map_y[idx]) + 0.5));
    if (x < 0 || x >= width || y < 0 || y >= height) continue;
    if (map.defined(x, y)) continue;
    double t = (double(e.t_us) - double(frame.start_t_us)) / span;
    map.set(x, y, float(std::clamp(t, 0.0, 1.0)));
  }
  return map;
}

DisparityMap esl_init_search(const TimeMap& camera_map, const TimeMap& projector_map,
                             int max_disparity) {
  require(camera_map.height() == projector_map.height(), ErrorKind::dimension_mismatch,
          "camera and projector maps must share their height");
  require(max_disparity >= 0 && max_disparity < projector_map.width(),
          ErrorKind::invalid_argument, "max_disparity must be below projector width");
  DisparityMap out(camera_map.width(), camera_map.height());
  for (int y = 0; y < camera_map.height(); ++y) {
    for (int x = 0; x < camera_map.width(); ++x) {
      if (!camera_map.defined(x, y)) continue;
      float t = camera_map.at(x, y);
      float best = std::numeric_limits<float>::infinity();
      int best_d = -1;
      int d_hi = std::min(max_disparity, projector_map.width() - 1 - x);
      for (int d = 0; d <= d_hi; ++d) {
        float v = projector_map.at(x + d, y);
        if (std::isnan(v)) continue;
        float diff = std::abs(t - v);
        if (diff < best) {  // strict: ties keep the smallest d
          best = diff;
          best_d = d;
        }
      }
      if (best_d >= 0) out.set(x, y, float(best_d));
    }
  }
  return out;
}

CompareStats compare_disparities(const DepthFrame& frame, const DisparityMap& map,
                                 double tol_px) {
  require(tol_px >= 0, ErrorKind::invalid_argument, "tolerance must be non-negative");
  CompareStats stats;
  for (size_t i = 0; i < frame.size(); ++i) {
    int x = int(std::floor(double(frame.x_r[i]) + 0.5));
    int y = int(std::floor(double(frame.y_r[i]) + 0.5));
    if (x < 0 || x >= map.width() || y < 0 || y >= map.height()) continue;
    if (!map.defined(x, y)) continue;
    double diff = double(frame.disparity_px[i]) - double(map.at(x, y));
    ++stats.n_compared;
    if (std::abs(diff) <= tol_px) ++stats.n_matched;
    ++stats.histogram[int(std::lround(diff))];
  }
  if (stats.n_compared > 0)
    stats.fraction = double(stats.n_matched) / double(stats.n_compared);
  return stats;
}

}  // namespace xmaps
