#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "core/events.hpp"
#include "core/geometry.hpp"
#include "core/trigger.hpp"

namespace xmaps {

// Dense (x, y) -> normalized time grid. Undefined cells are NaN; defined
// values stay in [0, 1].
class TimeMap {
 public:
  TimeMap(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  bool defined(int x, int y) const { return !std::isnan(values_[index(x, y)]); }
  float at(int x, int y) const { return values_[index(x, y)]; }
  void set(int x, int y, float value) { values_[index(x, y)] = value; }
  void clear(int x, int y) { values_[index(x, y)] = undefined_value(); }

  size_t defined_count() const;
  std::span<const float> values() const { return values_; }
  std::span<float> values() { return values_; }
  size_t index(int x, int y) const { return size_t(y) * size_t(width_) + size_t(x); }

  static float undefined_value() { return std::numeric_limits<float>::quiet_NaN(); }

 private:
  int width_, height_;
  std::vector<float> values_;
};

// Raster-scan timing of the tilted projector: `rows` scan lines per frame
// (the near-vertical lines of the scene, the x axis of the tilted image).
struct ScanModel {
  int rows = 720;
  double frame_rate_hz = 60.0;
  double line_period_us = 1e6 / (720.0 * 60.0);

  static ScanModel from_rate(int rows, double frame_rate_hz);
  void validate() const;  // line_period must equal 1/(rows*frame_rate) within 0.1 %
};

enum class IdealVariant {
  simple,  // value(x, y) = x / width
  full,    // value(x, y) = (x + y/height) / width
};

// Normalized first-event time per pixel of one frame slice. Expects
// positive-only, deduplicated events; earlier duplicates win regardless.
TimeMap build_camera_time_map(std::span<const Event> events, const FrameSlice& frame,
                              int sensor_width, int sensor_height);

// Constant-speed reference time map of the tilted projector. Time increases
// linearly with the scan-line index along x; the full variant adds the
// within-line fraction.
TimeMap ideal_projector_time_map(int width, int height, const ScanModel& scan,
                                 IdealVariant variant = IdealVariant::simple);

// Per-cell mean over the maps where the cell is defined.
TimeMap average_normalized_time_maps(std::span<const TimeMap> maps);

// Corner points of the defined region, ordered TL, TR, BR, BL, found as the
// extreme cells of x+y and x-y (the projected region is a convex
// quadrilateral by construction).
struct Corners {
  std::array<std::array<double, 2>, 4> pts{};  // TL, TR, BR, BL
};
Corners find_projection_corners(const TimeMap& map, double min_defined_fraction = 0.05);

// Exact 4-point DLT homography mapping each src corner to its dst corner.
// Throws when any 3 source or destination points are collinear.
Mat3 homography_from_corners(const Corners& src, const Corners& dst);

// Inverse warp with bilinear interpolation; a destination cell is defined
// only if every source cell with nonzero interpolation weight is defined.
TimeMap warp_time_map(const TimeMap& map, const Mat3& homography, int out_width,
                      int out_height);

// Fills undefined cells lying strictly between two defined cells of the same
// row by linear interpolation along x (the time axis in the tilted
// convention). No extrapolation at row ends.
TimeMap interpolate_rows(const TimeMap& map);

// Full planar-recording calibration: average the normalized camera maps,
// locate the projection corners, map the quadrilateral onto the projector
// rectangle, warp, and interpolate rows. The result is the calibrated
// projector time map on the projector's own grid.
TimeMap calibrate_time_map(std::span<const TimeMap> planar_frames, int projector_width,
                           int projector_height);

}  // namespace xmaps
