#include "core/xmap.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace xmaps {

XMap::XMap(int height, int time_columns) : height_(height), time_columns_(time_columns) {
  require(height > 0 && time_columns > 0, ErrorKind::invalid_argument,
          "X-map dimensions must be positive");
  entries_.assign(size_t(height) * size_t(time_columns), undefined_value());
}

XMap build_projector_xmap(const TimeMap& m, int projector_width, int time_columns) {
  require(projector_width >= 2, ErrorKind::invalid_argument,
          "projector width must be at least 2");
  if (time_columns == 0) time_columns = projector_width;
  XMap xmap(m.height(), time_columns);
  const float threshold = 2.0f / float(projector_width);
  const int w = m.width();
  for (int y = 0; y < m.height(); ++y) {
    const float* row = m.values().data() + m.index(0, y);
    for (int k = 0; k < time_columns; ++k) {
      float t = (float(k) + 0.5f) / float(time_columns);
      float best = std::numeric_limits<float>::infinity();
      int best_x = -1;
      for (int x = 0; x < w; ++x) {
        float v = row[x];
        if (std::isnan(v)) continue;
        float d = std::abs(t - v);
        if (d < best) {  // strict: ties keep the smallest x
          best = d;
          best_x = x;
        }
      }
      if (best_x >= 0 && best <= threshold) xmap.set(y, k, float(best_x));
    }
  }
  return xmap;
}

LookupResult lookup_disparity(const XMap& xmap, double x_cr, double y_cr, uint64_t t_us,
                              const FrameSlice& frame) {
  int y = int(std::floor(y_cr + 0.5));  // round half up, matching depth_frame
  if (y < 0 || y >= xmap.height()) return {0, DiscardReason::out_of_bounds};
  double span = double(frame.end_t_us) - double(frame.start_t_us);
  double t_norm = span > 0 ? (double(t_us) - double(frame.start_t_us)) / span : 0.0;
  int column = int(std::floor(t_norm * xmap.time_columns()));
  column = std::clamp(column, 0, xmap.time_columns() - 1);
  float x_pr = xmap.at(y, column);
  if (std::isnan(x_pr)) return {0, DiscardReason::undefined_entry};
  double d = double(x_pr) - x_cr;
  if (d <= 0) return {0, DiscardReason::nonpositive_disparity};
  return {d, DiscardReason::none};
}

DepthFrame depth_frame(std::span<const Event> events, const FrameSlice& frame,
                       const XMap& xmap, const RectifyMap& camera_rectify,
                       const StereoCalibration& calib, DedupMode dedup) {
  require(camera_rectify.width == calib.camera.width &&
              camera_rectify.height == calib.camera.height,
          ErrorKind::dimension_mismatch, "rectify map does not match camera resolution");

  std::vector<Event> deduped;
  std::span<const Event> input = events;
  if (dedup == DedupMode::keep_first) {
    deduped = dedup_range(events, uint16_t(calib.camera.width),
                          uint16_t(calib.camera.height), dedup);
    input = deduped;
  }

  DepthFrame out;
  out.start_t_us = frame.start_t_us;
  out.end_t_us = frame.end_t_us;
  out.n_input = input.size();
  out.x_r.reserve(input.size());
  out.y_r.reserve(input.size());
  out.disparity_px.reserve(input.size());
  out.depth_m.reserve(input.size());
  out.t_us.reserve(input.size());

  const double span = double(frame.end_t_us) - double(frame.start_t_us);
  const double inv_span = span > 0 ? 1.0 / span : 0.0;
  const double f_times_b = calib.rectified_focal() * calib.baseline();
  const int columns = xmap.time_columns();
  const float* mx = camera_rectify.map_x.data();
  const float* my = camera_rectify.map_y.data();
  const size_t stride = size_t(camera_rectify.width);

  for (const Event& e : input) {
    require(e.x < camera_rectify.width && e.y < camera_rectify.height,
            ErrorKind::dimension_mismatch, "event outside rectify map");
    size_t idx = size_t(e.y) * stride + e.x;
    float xr = mx[idx];
    float yr = my[idx];
    if (std::isnan(xr) || std::isnan(yr)) {
      ++out.discarded[size_t(DiscardReason::out_of_bounds)];
      continue;
    }
    int y = int(std::floor(double(yr) + 0.5));  // round half up
    if (y < 0 || y >= xmap.height()) {
      ++out.discarded[size_t(DiscardReason::out_of_bounds)];
      continue;
    }
    double t_norm = (double(e.t_us) - double(frame.start_t_us)) * inv_span;
    int column = int(t_norm * columns);
    column = std::clamp(column, 0, columns - 1);
    float x_pr = xmap.at(y, column);
    if (std::isnan(x_pr)) {
      ++out.discarded[size_t(DiscardReason::undefined_entry)];
      continue;
    }
    double d = double(x_pr) - double(xr);
    if (d <= 0) {
      ++out.discarded[size_t(DiscardReason::nonpositive_disparity)];
      continue;
    }
    out.x_r.push_back(xr);
    out.y_r.push_back(yr);
    out.disparity_px.push_back(float(d));
    out.depth_m.push_back(float(f_times_b / d));
    out.t_us.push_back(e.t_us);
  }
  return out;
}

}  // namespace xmaps
