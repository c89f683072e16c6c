#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "core/events.hpp"
#include "core/geometry.hpp"
#include "core/timemap.hpp"
#include "core/trigger.hpp"

namespace xmaps {

// Lookup table (y, t-column) -> rectified projector x. The transposed
// counterpart of a time map: flattening the event cuboid onto the (y, t)
// face with x as the stored value, so disparity retrieval needs no search.
class XMap {
 public:
  XMap(int height, int time_columns);

  int height() const { return height_; }
  int time_columns() const { return time_columns_; }
  bool defined(int y, int column) const { return !std::isnan(entries_[index(y, column)]); }
  float at(int y, int column) const { return entries_[index(y, column)]; }
  void set(int y, int column, float x) { entries_[index(y, column)] = x; }

  std::span<const float> entries() const { return entries_; }
  std::span<float> entries() { return entries_; }
  size_t index(int y, int column) const {
    return size_t(y) * size_t(time_columns_) + size_t(column);
  }

  static float undefined_value() { return std::numeric_limits<float>::quiet_NaN(); }

 private:
  int height_, time_columns_;
  std::vector<float> entries_;
};

// Builds the projector X-map from a rectified projector time map by
// exhaustive per-entry search: entry(y, k) is the column x of `m` minimizing
// |t_k - m(x, y)| for the column-center time t_k = (k + 0.5)/time_columns,
// subject to the mismatch staying within two scan lines (2/projector_width).
// Ties break toward the smallest x. time_columns defaults to projector_width.
XMap build_projector_xmap(const TimeMap& m, int projector_width, int time_columns = 0);

enum class DiscardReason : uint8_t {
  none = 0,
  undefined_entry = 1,
  nonpositive_disparity = 2,
  out_of_bounds = 3,
};

struct LookupResult {
  double disparity = 0;
  DiscardReason reason = DiscardReason::none;

  bool ok() const { return reason == DiscardReason::none; }
};

// Direct disparity lookup for one rectified event. The event time is
// normalized by the detected frame span, discretized to a t-column, and the
// X-map entry at (round(y_cr), column) yields d = x_pr - x_cr. Discards are
// data, not errors.
LookupResult lookup_disparity(const XMap& xmap, double x_cr, double y_cr, uint64_t t_us,
                              const FrameSlice& frame);

// Per-event output of one projected frame, plus discard accounting.
struct DepthFrame {
  std::vector<float> x_r, y_r;          // rectified event coordinates
  std::vector<float> disparity_px;
  std::vector<float> depth_m;
  std::vector<uint64_t> t_us;
  uint64_t start_t_us = 0, end_t_us = 0;
  size_t n_input = 0;
  // Indexed by DiscardReason (entry 0 unused).
  std::array<size_t, 4> discarded{};

  size_t size() const { return depth_m.size(); }
  size_t total_discarded() const { return discarded[1] + discarded[2] + discarded[3]; }
};

// Per-event pipeline over one frame slice: dedup -> rectify -> disparity
// lookup -> depth. No camera-side X-map is materialized.
DepthFrame depth_frame(std::span<const Event> events, const FrameSlice& frame,
                       const XMap& xmap, const RectifyMap& camera_rectify,
                       const StereoCalibration& calib, DedupMode dedup);

}  // namespace xmaps
