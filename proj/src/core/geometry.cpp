#include "core/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "core/error.hpp"
#include "core/timemap.hpp"

namespace xmaps {

double Vec3::norm() const { return std::sqrt(x * x + y * y + z * z); }

Vec3 Vec3::normalized() const {
  double n = norm();
  require(n > 0, ErrorKind::degenerate, "cannot normalize zero vector");
  return {x / n, y / n, z / n};
}

Mat3 Mat3::from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
  Mat3 r;
  r.m = {r0.x, r0.y, r0.z, r1.x, r1.y, r1.z, r2.x, r2.y, r2.z};
  return r;
}

Vec3 Mat3::operator*(const Vec3& v) const {
  return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
          m[3] * v.x + m[4] * v.y + m[5] * v.z,
          m[6] * v.x + m[7] * v.y + m[8] * v.z};
}

Mat3 Mat3::operator*(const Mat3& o) const {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0;
      for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
      r(i, j) = s;
    }
  return r;
}

Mat3 Mat3::transposed() const {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
  return r;
}

double Mat3::determinant() const {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Mat3 Mat3::inverse() const {
  double det = determinant();
  double scale = 0;
  for (double v : m) scale = std::max(scale, std::abs(v));
  require(std::abs(det) > 1e-14 * scale * scale * scale + 1e-300, ErrorKind::degenerate,
          "singular matrix");
  Mat3 adj;
  adj(0, 0) = m[4] * m[8] - m[5] * m[7];
  adj(0, 1) = m[2] * m[7] - m[1] * m[8];
  adj(0, 2) = m[1] * m[5] - m[2] * m[4];
  adj(1, 0) = m[5] * m[6] - m[3] * m[8];
  adj(1, 1) = m[0] * m[8] - m[2] * m[6];
  adj(1, 2) = m[2] * m[3] - m[0] * m[5];
  adj(2, 0) = m[3] * m[7] - m[4] * m[6];
  adj(2, 1) = m[1] * m[6] - m[0] * m[7];
  adj(2, 2) = m[0] * m[4] - m[1] * m[3];
  Mat3 inv;
  for (int i = 0; i < 9; ++i) inv.m[size_t(i)] = adj.m[size_t(i)] / det;
  return inv;
}

void PinholeIntrinsics::validate() const {
  require(fx > 0 && fy > 0, ErrorKind::invalid_argument, "focal lengths must be positive");
  require(width > 0 && height > 0, ErrorKind::invalid_argument,
          "resolution must be positive");
  require(cx >= 0 && cx < width, ErrorKind::invalid_argument,
          "principal point cx outside image");
  require(cy >= 0 && cy < height, ErrorKind::invalid_argument,
          "principal point cy outside image");
}

void StereoCalibration::validate() const {
  camera.validate();
  projector.validate();
  Mat3 rtr = rotation.transposed() * rotation;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double expected = i == j ? 1.0 : 0.0;
      require(std::abs(rtr(i, j) - expected) <= 1e-9, ErrorKind::invalid_argument,
              "rotation is not orthonormal");
    }
  require(baseline() > 0, ErrorKind::degenerate, "baseline must be positive");
}

Rectifier::Rectifier(const StereoCalibration& calib) : calib_(calib) {
  calib.validate();
  require(calib.baseline() >= 1e-9, ErrorKind::degenerate,
          "degenerate baseline (< 1e-9 m)");
  // Baseline direction from the projector center toward the camera center,
  // expressed in the camera frame; becomes the rectified x axis.
  Vec3 e1 = (calib.rotation.transposed() * calib.translation).normalized();
  Vec3 up{0, 0, 1};
  Vec3 e2 = up.cross(e1);
  require(e2.norm() > 1e-12, ErrorKind::degenerate,
          "baseline parallel to the optical axis");
  e2 = e2.normalized();
  Vec3 e3 = e1.cross(e2);
  r_cam_ = Mat3::from_rows(e1, e2, e3);
  r_proj_ = r_cam_ * calib.rotation.transposed();
  f_ = calib.rectified_focal();
  cx_ = calib.rectified_cx();
  cy_ = calib.rectified_cy();
}

std::optional<std::pair<double, double>> Rectifier::apply(const Mat3& r,
                                                          const Vec3& ray) const {
  Vec3 u = r * ray;
  if (u.z <= 1e-12) return std::nullopt;
  return std::make_pair(f_ * u.x / u.z + cx_, f_ * u.y / u.z + cy_);
}

std::optional<std::pair<double, double>> Rectifier::camera_to_rectified(double x,
                                                                        double y) const {
  return apply(r_cam_, calib_.camera.ray(x, y));
}

std::optional<std::pair<double, double>> Rectifier::projector_to_rectified(
    double x, double y) const {
  return apply(r_proj_, calib_.projector.ray(x, y));
}

std::optional<std::pair<double, double>> Rectifier::rectified_to_projector(
    double xr, double yr) const {
  Vec3 ray{(xr - cx_) / f_, (yr - cy_) / f_, 1.0};
  Vec3 v = r_proj_.transposed() * ray;
  if (v.z <= 1e-12) return std::nullopt;
  return std::make_pair(calib_.projector.fx * v.x / v.z + calib_.projector.cx,
                        calib_.projector.fy * v.y / v.z + calib_.projector.cy);
}

bool RectifyMap::defined(int x, int y) const {
  return !std::isnan(map_x[index(x, y)]) && !std::isnan(map_y[index(x, y)]);
}

namespace {

RectifyMap sample_map(int width, int height,
                      const std::function<std::optional<std::pair<double, double>>(
                          double, double)>& transform) {
  RectifyMap map;
  map.width = width;
  map.height = height;
  map.map_x.assign(size_t(width) * size_t(height), std::numeric_limits<float>::quiet_NaN());
  map.map_y.assign(size_t(width) * size_t(height), std::numeric_limits<float>::quiet_NaN());
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (auto r = transform(x, y)) {
        map.map_x[map.index(x, y)] = float(r->first);
        map.map_y[map.index(x, y)] = float(r->second);
      }
    }
  }
  return map;
}

}  // namespace

std::pair<RectifyMap, RectifyMap> compute_rectification(const StereoCalibration& calib) {
  Rectifier rect(calib);
  RectifyMap cam = sample_map(calib.camera.width, calib.camera.height,
                              [&](double x, double y) { return rect.camera_to_rectified(x, y); });
  RectifyMap proj =
      sample_map(calib.projector.width, calib.projector.height,
                 [&](double x, double y) { return rect.projector_to_rectified(x, y); });
  return {std::move(cam), std::move(proj)};
}

std::optional<std::pair<double, double>> rectify_point(const RectifyMap& map, int x, int y) {
  require(x >= 0 && x < map.width && y >= 0 && y < map.height, ErrorKind::out_of_bounds,
          "pixel outside source resolution");
  if (!map.defined(x, y)) return std::nullopt;
  return std::make_pair(double(map.map_x[map.index(x, y)]),
                        double(map.map_y[map.index(x, y)]));
}

double disparity_to_depth(double disparity_px, const StereoCalibration& calib) {
  require(disparity_px > 0, ErrorKind::invalid_argument,
          "non-positive disparity has no depth");
  return calib.rectified_focal() * calib.baseline() / disparity_px;
}

Vec3 event_to_3d(double x_r, double y_r, double disparity_px,
                 const StereoCalibration& calib) {
  double z = disparity_to_depth(disparity_px, calib);
  double f = calib.rectified_focal();
  return {(x_r - calib.rectified_cx()) * z / f, (y_r - calib.rectified_cy()) * z / f, z};
}

TimeMap resample_time_map_to_rectified(const TimeMap& projector_map,
                                       const StereoCalibration& calib, int out_width,
                                       int out_height) {
  require(out_width > 0 && out_height > 0, ErrorKind::invalid_argument,
          "output dimensions must be positive");
  Rectifier rect(calib);
  TimeMap out(out_width, out_height);
  const double kSnap = 1e-9;
  for (int yr = 0; yr < out_height; ++yr) {
    for (int xr = 0; xr < out_width; ++xr) {
      auto src = rect.rectified_to_projector(xr, yr);
      if (!src) continue;
      auto [sx, sy] = *src;
      if (sx < 0 || sy < 0 || sx > projector_map.width() - 1 ||
          sy > projector_map.height() - 1)
        continue;
      int x0 = int(std::floor(sx));
      int y0 = int(std::floor(sy));
      double fx = sx - x0;
      double fy = sy - y0;
      // Snap near-integer sample positions so exact grid hits need only the
      // single source cell.
      if (fx < kSnap) fx = 0;
      if (fy < kSnap) fy = 0;
      if (1 - fx < kSnap && x0 + 1 <= projector_map.width() - 1) { fx = 0; ++x0; }
      if (1 - fy < kSnap && y0 + 1 <= projector_map.height() - 1) { fy = 0; ++y0; }
      int x1 = fx > 0 ? x0 + 1 : x0;
      int y1 = fy > 0 ? y0 + 1 : y0;
      if (x1 > projector_map.width() - 1 || y1 > projector_map.height() - 1) continue;
      if (!projector_map.defined(x0, y0) || !projector_map.defined(x1, y0) ||
          !projector_map.defined(x0, y1) || !projector_map.defined(x1, y1))
        continue;
      double v00 = projector_map.at(x0, y0);
      double v10 = projector_map.at(x1, y0);
      double v01 = projector_map.at(x0, y1);
      double v11 = projector_map.at(x1, y1);
      double v = (1 - fy) * ((1 - fx) * v00 + fx * v10) + fy * ((1 - fx) * v01 + fx * v11);
      out.set(xr, yr, float(v));
    }
  }
  return out;
}

}  // namespace xmaps
