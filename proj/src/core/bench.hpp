#pragma once

#include <span>

#include "core/events.hpp"
#include "core/geometry.hpp"
#include "core/trigger.hpp"
#include "core/xmap.hpp"

namespace xmaps {

struct BenchStats {
  double mean_ms = 0;
  double stddev_ms = 0;
  size_t n_events = 0;    // events entering the timed pipeline
  size_t n_retained = 0;  // points produced per repetition
  int repetitions = 0;
};

// Wall time of depth_frame over `repetitions` runs, single thread. I/O and
// the X-map build stay outside the timed region.
BenchStats bench_depth_frame(std::span<const Event> events, const FrameSlice& frame,
                             const XMap& xmap, const RectifyMap& camera_rectify,
                             const StereoCalibration& calib, DedupMode dedup,
                             int repetitions);

}  // namespace xmaps
