#include <doctest.h>

#include <cmath>
#include <random>

#include "core/error.hpp"
#include "core/events.hpp"
#include "core/simulator.hpp"
#include "core/timemap.hpp"
#include "core/trigger.hpp"
#include "test_support.hpp"

using namespace xmaps;
using test::aligned_rig;
using test::integer_time_profile;
using test::make_stream;

namespace {

// Small rig whose projection footprint sits strictly inside the camera view
// (about 14 % of the image), as a planar calibration recording would.
StereoCalibration calibration_rig() {
  return aligned_rig(320, 240, 250.0, 90, 120, 0.1, 130.0, 60.0);
}

TimeMap true_time_map(const ScanProfile& profile, int w, int h) {
  TimeMap m(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      m.set(x, y, float(profile.speed.eval((x + double(y) / h) / w)));
  return m;
}

}  // namespace

TEST_SUITE_BEGIN("timemap");

TEST_CASE("camera time map normalization endpoints") {
  FrameSlice frame{1000, 2000, 0, 1};
  EventStream s1 = make_stream(8, 8, {{1000, 3, 4, 1}});
  TimeMap m1 = build_camera_time_map(s1.span(), frame, 8, 8);
  REQUIRE(m1.defined(3, 4));
  CHECK(m1.at(3, 4) == 0.0f);
  CHECK(m1.defined_count() == 1);

  EventStream s2 = make_stream(8, 8, {{2000, 3, 4, 1}});
  frame.begin_index = 0;
  frame.end_index = 1;
  TimeMap m2 = build_camera_time_map(s2.span(), frame, 8, 8);
  CHECK(m2.at(3, 4) == 1.0f);
}

TEST_CASE("camera time map rejects a zero-span frame") {
  EventStream s = make_stream(8, 8, {{5, 1, 1, 1}});
  FrameSlice frame{5, 5, 0, 1};
  CHECK_THROWS_AS(build_camera_time_map(s.span(), frame, 8, 8), Error);
}

TEST_CASE("camera time map grows along the scan direction") {
  auto calib = aligned_rig(160, 120, 200.0, 160, 120, 0.1, 20.0);
  auto profile = integer_time_profile(160, 120);
  SimResult sim = simulate(PlaneScene{1.0}, calib, profile, 1, 3);
  auto slices = split_frames(sim.events, TriggerConfig{});
  REQUIRE(slices.size() == 1);
  TimeMap map = build_camera_time_map(
      sim.events.span().subspan(slices[0].begin_index, slices[0].count()), slices[0],
      160, 120);
  for (int y = 0; y < 120; y += 13) {
    float prev = -1.0f;
    for (int x = 0; x < 160; ++x) {
      if (!map.defined(x, y)) continue;
      CHECK(map.at(x, y) > prev);
      prev = map.at(x, y);
    }
  }
}

TEST_CASE("ideal projector time map ramps") {
  ScanModel scan = ScanModel::from_rate(4, 60.0);
  TimeMap simple = ideal_projector_time_map(4, 3, scan, IdealVariant::simple);
  CHECK(simple.at(0, 0) == 0.0f);
  CHECK(simple.at(3, 0) == 0.75f);
  for (int x = 0; x < 4; ++x)
    for (int y = 1; y < 3; ++y) CHECK(simple.at(x, y) == simple.at(x, 0));

  TimeMap full = ideal_projector_time_map(4, 3, scan, IdealVariant::full);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 4; ++x) {
      double diff = double(full.at(x, y)) - double(simple.at(x, y));
      CHECK(diff >= 0.0);
      CHECK(diff < 1.0 / 4.0);
    }
}

TEST_CASE("ideal map is non-decreasing along x") {
  ScanModel scan = ScanModel::from_rate(33, 60.0);
  for (auto variant : {IdealVariant::simple, IdealVariant::full}) {
    TimeMap m = ideal_projector_time_map(33, 17, scan, variant);
    for (int y = 0; y < 17; ++y)
      for (int x = 1; x < 33; ++x) CHECK(m.at(x, y) >= m.at(x - 1, y));
  }
}

TEST_CASE("averaging time maps") {
  TimeMap a(4, 2), b(4, 2);
  a.set(1, 0, 0.2f);
  b.set(1, 0, 0.4f);
  a.set(2, 1, 0.6f);
  std::vector<TimeMap> maps{a, b};
  TimeMap avg = average_normalized_time_maps(maps);
  CHECK(avg.at(1, 0) == doctest::Approx(0.3));
  CHECK(avg.at(2, 1) == doctest::Approx(0.6));  // defined in one map only
  CHECK_FALSE(avg.defined(0, 0));

  std::vector<TimeMap> same{a, a};
  TimeMap avg2 = average_normalized_time_maps(same);
  CHECK(avg2.at(1, 0) == a.at(1, 0));

  CHECK_THROWS_AS(average_normalized_time_maps({}), Error);
  std::vector<TimeMap> mismatched{TimeMap(4, 2), TimeMap(3, 2)};
  CHECK_THROWS_AS(average_normalized_time_maps(mismatched), Error);
}

TEST_CASE("averaging ten jittered maps suppresses noise by about sqrt(10)") {
  auto calib = calibration_rig();
  auto profile = integer_time_profile(90, 120);
  auto noise_free = simulate(PlaneScene{1.0}, calib, profile, 1, 11);
  auto clean_slices = split_frames(noise_free.events, TriggerConfig{});
  REQUIRE(clean_slices.size() == 1);
  TimeMap reference = build_camera_time_map(
      noise_free.events.span().subspan(clean_slices[0].begin_index,
                                       clean_slices[0].count()),
      clean_slices[0], 320, 240);

  profile.t_jitter_sigma_us = 2.0 * 10800.0 / 90.0;  // two scan lines
  auto noisy = simulate(PlaneScene{1.0}, calib, profile, 10, 11);
  auto slices = split_frames(noisy.events, TriggerConfig{});
  REQUIRE(slices.size() == 10);
  std::vector<TimeMap> maps;
  for (const FrameSlice& s : slices) {
    maps.push_back(build_camera_time_map(
        noisy.events.span().subspan(s.begin_index, s.count()), s, 320, 240));
  }
  TimeMap averaged = average_normalized_time_maps(maps);

  auto deviation = [&](const TimeMap& m) {
    double sum = 0;
    size_t n = 0;
    for (int y = 0; y < 240; ++y)
      for (int x = 0; x < 320; ++x) {
        if (!m.defined(x, y) || !reference.defined(x, y)) continue;
        sum += std::abs(double(m.at(x, y)) - double(reference.at(x, y)));
        ++n;
      }
    REQUIRE(n > 1000);
    return sum / double(n);
  };
  double single = 0;
  for (const TimeMap& m : maps) single += deviation(m);
  single /= double(maps.size());
  double averaged_dev = deviation(averaged);
  double ratio = averaged_dev / single;
  CHECK(ratio < 0.5);
  CHECK(ratio > 0.18);  // approximately 1/sqrt(10)
}

TEST_CASE("corner detection on an axis-aligned rectangle") {
  TimeMap m(64, 64);
  for (int y = 30; y <= 40; ++y)
    for (int x = 10; x <= 20; ++x) m.set(x, y, 0.5f);
  Corners c = find_projection_corners(m, 0.01);
  CHECK(c.pts[0][0] == 10); CHECK(c.pts[0][1] == 30);
  CHECK(c.pts[1][0] == 20); CHECK(c.pts[1][1] == 30);
  CHECK(c.pts[2][0] == 20); CHECK(c.pts[2][1] == 40);
  CHECK(c.pts[3][0] == 10); CHECK(c.pts[3][1] == 40);
}

TEST_CASE("corner detection on a rotated rectangle") {
  // cos = 0.8, sin = 0.6 rotation of a 60x30 rectangle centred at (50, 50):
  // its corners land on integer cells (65,80), (83,56), (35,20), (17,44).
  TimeMap m(100, 100);
  for (int y = 0; y < 100; ++y) {
    for (int x = 0; x < 100; ++x) {
      double dx = x - 50.0, dy = y - 50.0;
      double u = 0.8 * dx + 0.6 * dy;
      double v = -0.6 * dx + 0.8 * dy;
      if (std::abs(u) <= 30.0 + 1e-9 && std::abs(v) <= 15.0 + 1e-9) m.set(x, y, 0.1f);
    }
  }
  Corners c = find_projection_corners(m, 0.01);
  CHECK(std::abs(c.pts[0][0] - 35.0) <= 1.0);  // TL
  CHECK(std::abs(c.pts[0][1] - 20.0) <= 1.0);
  CHECK(std::abs(c.pts[1][0] - 83.0) <= 1.0);  // TR
  CHECK(std::abs(c.pts[1][1] - 56.0) <= 1.0);
  CHECK(std::abs(c.pts[2][0] - 65.0) <= 1.0);  // BR
  CHECK(std::abs(c.pts[2][1] - 80.0) <= 1.0);
  CHECK(std::abs(c.pts[3][0] - 17.0) <= 1.0);  // BL
  CHECK(std::abs(c.pts[3][1] - 44.0) <= 1.0);
}

TEST_CASE("corner detection rejects an undefined map") {
  TimeMap m(32, 32);
  CHECK_THROWS_AS(find_projection_corners(m), Error);
  m.set(5, 5, 0.5f);  // far below the 5 % coverage floor
  CHECK_THROWS_AS(find_projection_corners(m), Error);
}

TEST_CASE("homography: identity and translation") {
  Corners square;
  square.pts = {{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  Mat3 h = homography_from_corners(square, square);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(h(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9));

  Corners shifted;
  shifted.pts = {{{2, 3}, {3, 3}, {3, 4}, {2, 4}}};
  Mat3 t = homography_from_corners(square, shifted);
  CHECK(t(0, 2) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(t(1, 2) == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(t(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(t(0, 1) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("homography residual on random quadrilaterals stays below 1e-9") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> jitter(-15.0, 15.0);
  for (int trial = 0; trial < 50; ++trial) {
    Corners src, dst;
    src.pts = {{{0 + jitter(rng), 0 + jitter(rng)},
                {100 + jitter(rng), 0 + jitter(rng)},
                {100 + jitter(rng), 100 + jitter(rng)},
                {0 + jitter(rng), 100 + jitter(rng)}}};
    dst.pts = {{{0 + jitter(rng), 0 + jitter(rng)},
                {640 + jitter(rng), 0 + jitter(rng)},
                {640 + jitter(rng), 480 + jitter(rng)},
                {0 + jitter(rng), 480 + jitter(rng)}}};
    Mat3 h = homography_from_corners(src, dst);
    for (int i = 0; i < 4; ++i) {
      Vec3 mapped = h * Vec3{src.pts[size_t(i)][0], src.pts[size_t(i)][1], 1.0};
      double x = mapped.x / mapped.z;
      double y = mapped.y / mapped.z;
      CHECK(std::abs(x - dst.pts[size_t(i)][0]) < 1e-9);
      CHECK(std::abs(y - dst.pts[size_t(i)][1]) < 1e-9);
    }
  }
}

TEST_CASE("homography rejects collinear corners") {
  Corners degenerate, square;
  degenerate.pts = {{{0, 0}, {1, 1}, {2, 2}, {0, 1}}};
  square.pts = {{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  CHECK_THROWS_AS(homography_from_corners(degenerate, square), Error);
  CHECK_THROWS_AS(homography_from_corners(square, degenerate), Error);
}

TEST_CASE("warping with the identity preserves the map") {
  TimeMap m(16, 12);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 16; ++x)
      if ((x + y) % 3 != 0) m.set(x, y, u(rng));
  TimeMap w = warp_time_map(m, Mat3::identity(), 16, 12);
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 16; ++x) {
      CHECK(w.defined(x, y) == m.defined(x, y));
      if (m.defined(x, y)) CHECK(w.at(x, y) == m.at(x, y));
    }
}

TEST_CASE("warping a constant map by a pure scale keeps the constant") {
  TimeMap m(20, 20);
  for (int y = 0; y < 20; ++y)
    for (int x = 0; x < 20; ++x) m.set(x, y, 0.25f);
  Mat3 scale = Mat3::identity();
  scale(0, 0) = 2.0;
  scale(1, 1) = 2.0;
  TimeMap w = warp_time_map(m, scale, 38, 38);
  size_t defined = 0;
  for (int y = 0; y < 38; ++y)
    for (int x = 0; x < 38; ++x)
      if (w.defined(x, y)) {
        CHECK(w.at(x, y) == 0.25f);
        ++defined;
      }
  CHECK(defined == 38 * 38);  // scaled-up source covers the whole output
}

TEST_CASE("warp rejects a singular homography") {
  TimeMap m(4, 4);
  Mat3 singular;
  singular.m = {1, 0, 0, 2, 0, 0, 0, 0, 1};
  CHECK_THROWS_AS(warp_time_map(m, singular, 4, 4), Error);
}

TEST_CASE("row interpolation fills interior gaps only") {
  TimeMap m(3, 1);
  m.set(0, 0, 0.1f);
  m.set(2, 0, 0.3f);
  TimeMap filled = interpolate_rows(m);
  CHECK(filled.at(1, 0) == doctest::Approx(0.2));

  TimeMap edges(3, 1);
  edges.set(1, 0, 0.5f);
  TimeMap unchanged = interpolate_rows(edges);
  CHECK_FALSE(unchanged.defined(0, 0));
  CHECK(unchanged.at(1, 0) == 0.5f);
  CHECK_FALSE(unchanged.defined(2, 0));
}

TEST_CASE("row interpolation reconstructs a decimated linear map exactly") {
  TimeMap m(30, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 30; x += 3) m.set(x, y, float(x) / 30.0f);
  TimeMap filled = interpolate_rows(m);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x <= 27; ++x) {
      REQUIRE(filled.defined(x, y));
      CHECK(filled.at(x, y) == doctest::Approx(double(x) / 30.0).epsilon(1e-6));
    }
}

TEST_CASE("calibration recovers the linear time map") {
  auto calib = calibration_rig();
  auto profile = integer_time_profile(90, 120);
  SimResult sim = simulate(PlaneScene{1.0}, calib, profile, 5, 17);
  auto slices = split_frames(sim.events, TriggerConfig{});
  REQUIRE(slices.size() == 5);
  std::vector<TimeMap> maps;
  for (const FrameSlice& s : slices)
    maps.push_back(build_camera_time_map(
        sim.events.span().subspan(s.begin_index, s.count()), s, 320, 240));
  TimeMap calibrated = calibrate_time_map(maps, 90, 120);
  TimeMap expected = true_time_map(profile, 90, 120);
  double tol = 2.0 / 90.0;
  size_t checked = 0;
  for (int y = 0; y < 120; ++y)
    for (int x = 0; x < 90; ++x) {
      if (!calibrated.defined(x, y)) continue;
      CHECK(std::abs(double(calibrated.at(x, y)) - double(expected.at(x, y))) <= tol);
      ++checked;
    }
  CHECK(checked > size_t(0.95 * 90 * 120));
}

TEST_CASE("calibration recovers a quadratic scan profile") {
  auto calib = calibration_rig();
  auto profile = integer_time_profile(90, 120);
  profile.speed = SpeedModel::quadratic(0.25);
  SimResult sim = simulate(PlaneScene{1.0}, calib, profile, 5, 18);
  auto slices = split_frames(sim.events, TriggerConfig{});
  REQUIRE(slices.size() == 5);
  std::vector<TimeMap> maps;
  for (const FrameSlice& s : slices)
    maps.push_back(build_camera_time_map(
        sim.events.span().subspan(s.begin_index, s.count()), s, 320, 240));
  TimeMap calibrated = calibrate_time_map(maps, 90, 120);
  TimeMap expected = true_time_map(profile, 90, 120);
  double tol = 2.0 / 90.0;
  size_t checked = 0;
  double worst = 0;
  for (int y = 0; y < 120; ++y)
    for (int x = 0; x < 90; ++x) {
      if (!calibrated.defined(x, y)) continue;
      worst = std::max(worst,
                       std::abs(double(calibrated.at(x, y)) - double(expected.at(x, y))));
      ++checked;
    }
  CHECK(worst <= tol);
  CHECK(checked > size_t(0.95 * 90 * 120));
}

TEST_CASE("calibration output values stay within [0, 1]") {
  auto calib = calibration_rig();
  auto profile = integer_time_profile(90, 120);
  SimResult sim = simulate(PlaneScene{1.0}, calib, profile, 2, 19);
  auto slices = split_frames(sim.events, TriggerConfig{});
  std::vector<TimeMap> maps;
  for (const FrameSlice& s : slices)
    maps.push_back(build_camera_time_map(
        sim.events.span().subspan(s.begin_index, s.count()), s, 320, 240));
  TimeMap calibrated = calibrate_time_map(maps, 90, 120);
  for (int y = 0; y < calibrated.height(); ++y)
    for (int x = 0; x < calibrated.width(); ++x)
      if (calibrated.defined(x, y)) {
        CHECK(calibrated.at(x, y) >= 0.0f);
        CHECK(calibrated.at(x, y) <= 1.0f);
      }
}

TEST_CASE("calibration is a fixed point on its own output") {
  // A fully defined projector-space map is itself a planar "camera" map whose
  // corners span the whole rectangle; recalibrating must reproduce it.
  auto calib = calibration_rig();
  auto profile = integer_time_profile(90, 120);
  SimResult sim = simulate(PlaneScene{1.0}, calib, profile, 3, 20);
  auto slices = split_frames(sim.events, TriggerConfig{});
  std::vector<TimeMap> maps;
  for (const FrameSlice& s : slices)
    maps.push_back(build_camera_time_map(
        sim.events.span().subspan(s.begin_index, s.count()), s, 320, 240));
  TimeMap calibrated = calibrate_time_map(maps, 90, 120);
  std::vector<TimeMap> again{calibrated};
  TimeMap twice = calibrate_time_map(again, 90, 120);
  double tol = 2.0 / 90.0;
  for (int y = 0; y < 120; ++y)
    for (int x = 0; x < 90; ++x) {
      if (!calibrated.defined(x, y) || !twice.defined(x, y)) continue;
      CHECK(std::abs(double(twice.at(x, y)) - double(calibrated.at(x, y))) <= tol);
    }
}

TEST_CASE("calibration requires input") {
  CHECK_THROWS_AS(calibrate_time_map({}, 90, 120), Error);
}

TEST_SUITE_END();
