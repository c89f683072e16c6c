#include "core/bench.hpp"

#include <chrono>
#include <cmath>

#include "core/error.hpp"

namespace xmaps {

BenchStats bench_depth_frame(std::span<const Event> events, const FrameSlice& frame,
                             const XMap& xmap, const RectifyMap& camera_rectify,
                             const StereoCalibration& calib, DedupMode dedup,
                             int repetitions) {
  require(repetitions > 0, ErrorKind::invalid_argument, "repetitions must be positive");
  using clock = std::chrono::steady_clock;

  // Warm-up run, also provides the retained count.
  DepthFrame warm = depth_frame(events, frame, xmap, camera_rectify, calib, dedup);

  double sum = 0, sum_sq = 0;
  size_t guard = 0;  // keeps the per-repetition result observable
  for (int i = 0; i < repetitions; ++i) {
    auto start = clock::now();
    DepthFrame result = depth_frame(events, frame, xmap, camera_rectify, calib, dedup);
    auto stop = clock::now();
    guard += result.size();
    double ms = std::chrono::duration<double, std::milli>(stop - start).count();
    sum += ms;
    sum_sq += ms * ms;
  }
  (void)guard;

  BenchStats stats;
  stats.repetitions = repetitions;
  stats.n_events = events.size();
  stats.n_retained = warm.size();
  stats.mean_ms = sum / repetitions;
  double var = sum_sq / repetitions - stats.mean_ms * stats.mean_ms;
  stats.stddev_ms = std::sqrt(std::max(var, 0.0));
  return stats;
}

}  // namespace xmaps
