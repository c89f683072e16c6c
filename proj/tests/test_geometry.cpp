#include <doctest.h>

#include <cmath>
#include <random>

#include "core/error.hpp"
#include "core/geometry.hpp"
#include "core/timemap.hpp"
#include "test_support.hpp"

using namespace xmaps;
using test::aligned_rig;

namespace {

Mat3 rotation_about_x(double radians) {
  Mat3 r = Mat3::identity();
  r(1, 1) = std::cos(radians);
  r(1, 2) = -std::sin(radians);
  r(2, 1) = std::sin(radians);
  r(2, 2) = std::cos(radians);
  return r;
}

}  // namespace

TEST_SUITE_BEGIN("geometry");

TEST_CASE("already-rectified rig yields identity maps") {
  StereoCalibration calib = aligned_rig(64, 48, 100.0, 64, 48, 0.1, 0.0);
  auto [cam, proj] = compute_rectification(calib);
  for (int y = 0; y < 48; y += 7) {
    for (int x = 0; x < 64; x += 7) {
      auto c = rectify_point(cam, x, y);
      REQUIRE(c.has_value());
      CHECK(c->first == doctest::Approx(x).epsilon(1e-12));
      CHECK(c->second == doctest::Approx(y).epsilon(1e-12));
      auto p = rectify_point(proj, x, y);
      REQUIRE(p.has_value());
      CHECK(p->first == doctest::Approx(x).epsilon(1e-12));
      CHECK(p->second == doctest::Approx(y).epsilon(1e-12));
    }
  }
}

TEST_CASE("rotated projector still aligns epipolar rows") {
  StereoCalibration calib = aligned_rig(640, 480, 500.0, 640, 480, 0.1, 0.0);
  // 1 degree about the baseline axis.
  calib.rotation = rotation_about_x(1.0 * 3.14159265358979323846 / 180.0);
  Rectifier rect(calib);

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ux(-0.4, 0.4);
  std::uniform_real_distribution<double> uz(0.6, 2.5);
  int checked = 0;
  for (int i = 0; i < 200 && checked < 100; ++i) {
    Vec3 p{ux(rng), ux(rng), uz(rng)};
    auto cam_px = calib.camera.project(p);
    Vec3 p_proj = calib.rotation * p + calib.translation;
    if (p_proj.z <= 0.1) continue;
    auto proj_px = calib.projector.project(p_proj);
    auto cam_rect = rect.camera_to_rectified(cam_px.first, cam_px.second);
    auto proj_rect = rect.projector_to_rectified(proj_px.first, proj_px.second);
    REQUIRE(cam_rect.has_value());
    REQUIRE(proj_rect.has_value());
    CHECK(std::abs(cam_rect->second - proj_rect->second) < 1e-6 * 480);
    // Disparity is purely horizontal and positive for points in front.
    CHECK(proj_rect->first - cam_rect->first > 0);
    ++checked;
  }
  CHECK(checked == 100);
}

TEST_CASE("rectify map entries match the analytic transform") {
  StereoCalibration calib = aligned_rig(64, 48, 100.0, 64, 48, 0.1, 0.0);
  calib.rotation = rotation_about_x(0.01);
  auto [cam, proj] = compute_rectification(calib);
  Rectifier rect(calib);
  auto c = rectify_point(proj, 0, 0);
  auto analytic = rect.projector_to_rectified(0, 0);
  REQUIRE(c.has_value());
  REQUIRE(analytic.has_value());
  CHECK(c->first == doctest::Approx(analytic->first).epsilon(1e-6));
  CHECK(c->second == doctest::Approx(analytic->second).epsilon(1e-6));
}

TEST_CASE("zero baseline is rejected") {
  StereoCalibration calib = aligned_rig();
  calib.translation = {0, 0, 0};
  CHECK_THROWS_AS(compute_rectification(calib), Error);
}

TEST_CASE("rectify_point bounds") {
  StereoCalibration calib = aligned_rig(32, 24, 50.0, 32, 24, 0.1, 0.0);
  auto [cam, proj] = compute_rectification(calib);
  CHECK_THROWS_AS(rectify_point(cam, 32, 0), Error);
  CHECK_THROWS_AS(rectify_point(cam, 0, -1), Error);
  CHECK(rectify_point(cam, 10, 20).has_value());
}

TEST_CASE("disparity_to_depth formula and error cases") {
  StereoCalibration calib = aligned_rig(640, 480, 100.0, 640, 480, 0.1, 0.0);
  CHECK(disparity_to_depth(10.0, calib) == doctest::Approx(1.0));
  CHECK(disparity_to_depth(20.0, calib) == doctest::Approx(0.5));
  CHECK_THROWS_AS(disparity_to_depth(0.0, calib), Error);
  CHECK_THROWS_AS(disparity_to_depth(-3.0, calib), Error);
}

TEST_CASE("disparity_to_depth is strictly decreasing") {
  StereoCalibration calib = aligned_rig();
  double prev = disparity_to_depth(0.5, calib);
  for (double d = 1.0; d < 200.0; d += 0.7) {
    double z = disparity_to_depth(d, calib);
    CHECK(z < prev);
    prev = z;
  }
}

TEST_CASE("event_to_3d on and off axis") {
  StereoCalibration calib = aligned_rig(640, 480, 100.0, 640, 480, 0.1, 0.0);
  Vec3 on_axis = event_to_3d(calib.camera.cx, calib.camera.cy, 10.0, calib);
  CHECK(on_axis.x == doctest::Approx(0.0));
  CHECK(on_axis.y == doctest::Approx(0.0));
  CHECK(on_axis.z == doctest::Approx(1.0));
  Vec3 off = event_to_3d(calib.camera.cx + 100.0, calib.camera.cy, 10.0, calib);
  CHECK(off.x == doctest::Approx(1.0));
  CHECK(off.y == doctest::Approx(0.0));
  CHECK(off.z == doctest::Approx(1.0));
}

TEST_CASE("round trip: project, rectify, disparity, back-project") {
  StereoCalibration calib = aligned_rig(640, 480, 500.0, 640, 480, 0.1, 0.0);
  calib.rotation = rotation_about_x(0.8 * 3.14159265358979323846 / 180.0);
  Rectifier rect(calib);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ux(-0.3, 0.3);
  std::uniform_real_distribution<double> uz(0.7, 2.0);
  for (int i = 0; i < 100; ++i) {
    Vec3 p{ux(rng), ux(rng), uz(rng)};
    auto cam_px = calib.camera.project(p);
    Vec3 p_proj = calib.rotation * p + calib.translation;
    auto proj_px = calib.projector.project(p_proj);
    auto cam_rect = rect.camera_to_rectified(cam_px.first, cam_px.second);
    auto proj_rect = rect.projector_to_rectified(proj_px.first, proj_px.second);
    REQUIRE(cam_rect.has_value());
    REQUIRE(proj_rect.has_value());
    double d = proj_rect->first - cam_rect->first;
    REQUIRE(d > 0);
    Vec3 recovered = event_to_3d(cam_rect->first, cam_rect->second, d, calib);
    // event_to_3d lives in the rectified camera frame.
    Vec3 expected = rect.camera_rotation() * p;
    CHECK(std::abs(recovered.x - expected.x) < 1e-6);
    CHECK(std::abs(recovered.y - expected.y) < 1e-6);
    CHECK(std::abs(recovered.z - expected.z) < 1e-6);
  }
}

TEST_CASE("resample to the rectified grid is exact for a shifted footprint") {
  // Small projector whose principal point places the rectified footprint at
  // (+306, +216): rectified coordinates are integer shifts of projector
  // pixels, so resampling must copy cells exactly.
  StereoCalibration calib = aligned_rig(640, 480, 500.0, 64, 48, 0.1, 306.0, 216.0);
  TimeMap m(64, 48);
  for (int y = 0; y < 48; ++y)
    for (int x = 0; x < 64; ++x) m.set(x, y, float((x + 1) / 100.0));
  TimeMap r = resample_time_map_to_rectified(m, calib, 640, 480);
  for (int y = 0; y < 48; ++y) {
    for (int x = 0; x < 64; ++x) {
      REQUIRE(r.defined(x + 306, y + 216));
      CHECK(r.at(x + 306, y + 216) == m.at(x, y));
    }
  }
  CHECK_FALSE(r.defined(305, 216));
  CHECK_FALSE(r.defined(370, 216));
  CHECK_FALSE(r.defined(306, 215));
}

TEST_CASE("orthonormality is enforced") {
  StereoCalibration calib = aligned_rig();
  calib.rotation(0, 0) = 1.5;
  CHECK_THROWS_AS(calib.validate(), Error);
}

TEST_SUITE_END();
