#include <doctest.h>

#include <cmath>
#include <random>

#include "core/error.hpp"
#include "core/metrics.hpp"
#include "core/simulator.hpp"
#include "core/trigger.hpp"
#include "core/xmap.hpp"
#include "test_support.hpp"

using namespace xmaps;
using test::aligned_rig;
using test::integer_time_profile;

namespace {

// Independent per-entry search used as the oracle for the builder: scans all
// columns with explicit tie handling, written without reference to the
// implementation.
float reference_entry(const TimeMap& m, int y, double t, double threshold) {
  double best = std::numeric_limits<double>::infinity();
  int best_x = -1;
  for (int x = 0; x < m.width(); ++x) {
    if (!m.defined(x, y)) continue;
    double diff = std::abs(t - double(m.at(x, y)));
    if (diff < best - 1e-12) {
      best = diff;
      best_x = x;
    }
  }
  if (best_x < 0 || best > threshold) return std::numeric_limits<float>::quiet_NaN();
  return float(best_x);
}

}  // namespace

TEST_SUITE_BEGIN("xmap");

TEST_CASE("linear time map inverts to the column index") {
  ScanModel scan = ScanModel::from_rate(16, 60.0);
  TimeMap m = ideal_projector_time_map(16, 4, scan, IdealVariant::simple);
  XMap xmap = build_projector_xmap(m, 16);
  REQUIRE(xmap.time_columns() == 16);
  REQUIRE(xmap.height() == 4);
  for (int y = 0; y < 4; ++y)
    for (int k = 0; k < 16; ++k) {
      REQUIRE(xmap.defined(y, k));
      CHECK(xmap.at(y, k) == float(k));
    }
}

TEST_CASE("entries beyond the two-line threshold stay undefined") {
  TimeMap m(16, 2);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 16; ++x) m.set(x, y, 0.5f);
  XMap xmap = build_projector_xmap(m, 16);
  // Column with center t = 0.95313: |t - 0.5| = 0.45 > 2/16.
  int far_column = 15;
  CHECK_FALSE(xmap.defined(0, far_column));
  // Columns near t = 0.5 resolve to the smallest matching x (tie rule).
  int mid_column = 7;  // center 0.46875, within 2/16
  REQUIRE(xmap.defined(0, mid_column));
  CHECK(xmap.at(0, mid_column) == 0.0f);
}

TEST_CASE("quadratic map matches the exhaustive reference search") {
  TimeMap m(256, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 256; ++x) {
      double s = double(x) / 256.0;
      m.set(x, y, float(s * s));
    }
  // A few undefined holes exercise the candidate filter.
  for (int y = 0; y < 8; ++y) m.clear(100 + y, y);
  XMap xmap = build_projector_xmap(m, 256);
  for (int y = 0; y < 8; ++y)
    for (int k = 0; k < 256; ++k) {
      double t = (k + 0.5) / 256.0;
      float expected = reference_entry(m, y, t, 2.0 / 256.0);
      if (std::isnan(expected)) {
        CHECK_FALSE(xmap.defined(y, k));
      } else {
        REQUIRE(xmap.defined(y, k));
        CHECK(xmap.at(y, k) == expected);
      }
    }
}

TEST_CASE("entries of a monotone map are non-decreasing along t") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> step(0.0, 0.02);
  for (int trial = 0; trial < 10; ++trial) {
    TimeMap m(64, 6);
    for (int y = 0; y < 6; ++y) {
      double v = 0.0;
      for (int x = 0; x < 64; ++x) {
        v = std::min(1.0, v + step(rng));
        m.set(x, y, float(v));
      }
    }
    XMap xmap = build_projector_xmap(m, 64);
    for (int y = 0; y < 6; ++y) {
      float prev = -1.0f;
      for (int k = 0; k < 64; ++k) {
        if (!xmap.defined(y, k)) continue;
        CHECK(xmap.at(y, k) >= prev);
        prev = xmap.at(y, k);
      }
    }
  }
}

TEST_CASE("lookup_disparity basics") {
  XMap xmap(10, 8);
  xmap.set(5, 3, 14.0f);
  FrameSlice frame{1000, 2000, 0, 0};
  // Column 3 covers t_norm in [0.375, 0.5): t = 1400 lands there.
  LookupResult hit = lookup_disparity(xmap, 10.0, 5.0, 1400, frame);
  REQUIRE(hit.ok());
  CHECK(hit.disparity == doctest::Approx(4.0));

  LookupResult nonpositive = lookup_disparity(xmap, 14.0, 5.0, 1400, frame);
  CHECK(nonpositive.reason == DiscardReason::nonpositive_disparity);
  LookupResult negative = lookup_disparity(xmap, 20.0, 5.0, 1400, frame);
  CHECK(negative.reason == DiscardReason::nonpositive_disparity);

  LookupResult undefined = lookup_disparity(xmap, 10.0, 4.0, 1400, frame);
  CHECK(undefined.reason == DiscardReason::undefined_entry);

  LookupResult outside = lookup_disparity(xmap, 10.0, 25.0, 1400, frame);
  CHECK(outside.reason == DiscardReason::out_of_bounds);
}

TEST_CASE("lookup_disparity clamps the time column") {
  XMap xmap(4, 4);
  for (int k = 0; k < 4; ++k) xmap.set(0, k, float(10 + k));
  FrameSlice frame{0, 100, 0, 0};
  LookupResult at_end = lookup_disparity(xmap, 1.0, 0.0, 100, frame);
  REQUIRE(at_end.ok());
  CHECK(at_end.disparity == doctest::Approx(12.0));  // column 3
  LookupResult at_start = lookup_disparity(xmap, 1.0, 0.0, 0, frame);
  REQUIRE(at_start.ok());
  CHECK(at_start.disparity == doctest::Approx(9.0));  // column 0
}

TEST_CASE("lookup_disparity is pure") {
  XMap xmap(6, 6);
  xmap.set(2, 2, 30.0f);
  FrameSlice frame{0, 600, 0, 0};
  LookupResult a = lookup_disparity(xmap, 7.25, 2.2, 250, frame);
  LookupResult b = lookup_disparity(xmap, 7.25, 2.2, 250, frame);
  CHECK(a.disparity == b.disparity);
  CHECK(a.reason == b.reason);
}

TEST_CASE("depth_frame on an empty slice") {
  auto calib = aligned_rig(64, 48, 100.0, 64, 48, 0.1, 0.0);
  auto [rect, rect_proj] = compute_rectification(calib);
  XMap xmap(48, 64);
  FrameSlice frame{0, 1000, 0, 0};
  DepthFrame out = depth_frame({}, frame, xmap, rect, calib, DedupMode::keep_first);
  CHECK(out.size() == 0);
  CHECK(out.n_input == 0);
  CHECK(out.total_discarded() == 0);
}

TEST_CASE("noise-free plane depths stay within the one-column bound") {
  auto calib = aligned_rig(160, 120, 200.0, 160, 120, 0.1, 20.0);
  auto profile = integer_time_profile(160, 120);
  SimResult sim = simulate(PlaneScene{1.0}, calib, profile, 1, 5);
  auto slices = split_frames(sim.events, TriggerConfig{});
  REQUIRE(slices.size() == 1);

  TimeMap ideal = ideal_projector_time_map(
      160, 120, ScanModel::from_rate(160, profile.scan.frame_rate_hz),
      IdealVariant::full);
  TimeMap rectified = resample_time_map_to_rectified(ideal, calib, 200, 120);
  XMap xmap = build_projector_xmap(rectified, 160);
  auto [rect_cam, rect_proj] = compute_rectification(calib);
  DepthFrame frame = depth_frame(
      sim.events.span().subspan(slices[0].begin_index, slices[0].count()), slices[0],
      xmap, rect_cam, calib, DedupMode::keep_first);
  REQUIRE(frame.size() > 10000);
  // One-column quantization bound at d = f*B/Z = 20 px.
  double d = 20.0;
  double bound = 200.0 * 0.1 / (d - 1.0) - 200.0 * 0.1 / d;
  for (size_t i = 0; i < frame.size(); i += 97) {
    CHECK(std::abs(double(frame.depth_m[i]) - 1.0) <= bound);
  }
}

TEST_CASE("keep_all retains at least as many points and at least the spread of keep_first") {
  auto calib = aligned_rig(160, 120, 200.0, 160, 120, 0.1, 20.0);
  auto profile = integer_time_profile(160, 120);
  profile.x_jitter_sigma_px = 1.5;
  SimResult sim = simulate(PlaneScene{1.0}, calib, profile, 1, 6);
  auto slices = split_frames(sim.events, TriggerConfig{});
  REQUIRE(slices.size() == 1);

  TimeMap ideal = ideal_projector_time_map(
      160, 120, ScanModel::from_rate(160, profile.scan.frame_rate_hz),
      IdealVariant::full);
  TimeMap rectified = resample_time_map_to_rectified(ideal, calib, 200, 120);
  XMap xmap = build_projector_xmap(rectified, 160);
  auto [rect_cam, rect_proj] = compute_rectification(calib);
  auto events = sim.events.span().subspan(slices[0].begin_index, slices[0].count());

  DepthFrame all = depth_frame(events, slices[0], xmap, rect_cam, calib,
                               DedupMode::keep_all);
  DepthFrame first = depth_frame(events, slices[0], xmap, rect_cam, calib,
                                 DedupMode::keep_first);
  CHECK(all.size() >= first.size());

  auto stddev = [](const std::vector<float>& v) {
    double mean = 0;
    for (float x : v) mean += x;
    mean /= double(v.size());
    double var = 0;
    for (float x : v) var += (x - mean) * (x - mean);
    return std::sqrt(var / double(v.size()));
  };
  CHECK(stddev(all.depth_m) >= stddev(first.depth_m) * 0.999);
}

TEST_CASE("depth_frame validates the rectify map dimensions") {
  auto calib = aligned_rig(64, 48, 100.0, 64, 48, 0.1, 0.0);
  auto calib_small = aligned_rig(32, 24, 50.0, 32, 24, 0.1, 0.0);
  auto [rect_small, p] = compute_rectification(calib_small);
  XMap xmap(48, 64);
  FrameSlice frame{0, 1000, 0, 0};
  CHECK_THROWS_AS(
      depth_frame({}, frame, xmap, rect_small, calib, DedupMode::keep_first), Error);
}

TEST_SUITE_END();
