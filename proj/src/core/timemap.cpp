#include "core/timemap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/error.hpp"

namespace xmaps {

TimeMap::TimeMap(int width, int height) : width_(width), height_(height) {
  require(width > 0 && height > 0, ErrorKind::invalid_argument,
          "time map dimensions must be positive");
  values_.assign(size_t(width) * size_t(height), undefined_value());
}

size_t TimeMap::defined_count() const {
  size_t n = 0;
  for (float v : values_)
    if (!std::isnan(v)) ++n;
  return n;
}

ScanModel ScanModel::from_rate(int rows, double frame_rate_hz) {
  ScanModel scan;
  scan.rows = rows;
  scan.frame_rate_hz = frame_rate_hz;
  scan.line_period_us = 1e6 / (double(rows) * frame_rate_hz);
  scan.validate();
  return scan;
}

void ScanModel::validate() const {
  require(rows > 0 && frame_rate_hz > 0, ErrorKind::invalid_argument,
          "scan model needs positive rows and frame rate");
  double nominal = 1e6 / (double(rows) * frame_rate_hz);
  require(std::abs(line_period_us - nominal) <= 1e-3 * nominal, ErrorKind::invalid_argument,
          "line period inconsistent with rows * frame rate");
}

TimeMap build_camera_time_map(std::span<const Event> events, const FrameSlice& frame,
                              int sensor_width, int sensor_height) {
  require(frame.end_t_us > frame.start_t_us, ErrorKind::invalid_argument,
          "zero-span frame");
  TimeMap map(sensor_width, sensor_height);
  double span = double(frame.end_t_us - frame.start_t_us);
  for (const Event& e : events) {
    if (e.x >= sensor_width || e.y >= sensor_height) continue;
    if (map.defined(e.x, e.y)) continue;  // first event wins
    double t = (double(e.t_us) - double(frame.start_t_us)) / span;
    map.set(e.x, e.y, float(std::clamp(t, 0.0, 1.0)));
  }
  return map;
}

TimeMap ideal_projector_time_map(int width, int height, const ScanModel& scan,
                                 IdealVariant variant) {
  scan.validate();
  TimeMap map(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double v = variant == IdealVariant::simple
                     ? double(x) / width
                     : (double(x) + double(y) / height) / width;
      map.set(x, y, float(std::clamp(v, 0.0, 1.0)));
    }
  }
  return map;
}

TimeMap average_normalized_time_maps(std::span<const TimeMap> maps) {
  require(!maps.empty(), ErrorKind::empty_input, "no time maps to average");
  int w = maps.front().width();
  int h = maps.front().height();
  for (const TimeMap& m : maps)
    require(m.width() == w && m.height() == h, ErrorKind::dimension_mismatch,
            "time map dimensions differ");
  TimeMap out(w, h);
  std::vector<double> sum(size_t(w) * size_t(h), 0.0);
  std::vector<uint32_t> count(size_t(w) * size_t(h), 0);
  for (const TimeMap& m : maps) {
    const auto values = m.values();
    for (size_t i = 0; i < values.size(); ++i) {
      if (!std::isnan(values[i])) {
        sum[i] += values[i];
        ++count[i];
      }
    }
  }
  auto out_values = out.values();
  for (size_t i = 0; i < out_values.size(); ++i) {
    if (count[i] > 0) out_values[i] = float(sum[i] / count[i]);
  }
  return out;
}

Corners find_projection_corners(const TimeMap& map, double min_defined_fraction) {
  size_t defined = map.defined_count();
  size_t total = size_t(map.width()) * size_t(map.height());
  require(double(defined) >= min_defined_fraction * double(total), ErrorKind::degenerate,
          "defined region too small for corner detection");
  double best_sum_min = std::numeric_limits<double>::infinity();
  double best_sum_max = -std::numeric_limits<double>::infinity();
  double best_diff_min = std::numeric_limits<double>::infinity();
  double best_diff_max = -std::numeric_limits<double>::infinity();
  std::array<double, 2> tl{}, br{}, tr{}, bl{};
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      if (!map.defined(x, y)) continue;
      double sum = double(x) + double(y);
      double diff = double(x) - double(y);
      if (sum < best_sum_min) { best_sum_min = sum; tl = {double(x), double(y)}; }
      if (sum > best_sum_max) { best_sum_max = sum; br = {double(x), double(y)}; }
      if (diff > best_diff_max) { best_diff_max = diff; tr = {double(x), double(y)}; }
      if (diff < best_diff_min) { best_diff_min = diff; bl = {double(x), double(y)}; }
    }
  }
  Corners c;
  c.pts = {tl, tr, br, bl};
  return c;
}

namespace {

// Solves the 8x8 linear system of the exact 4-point DLT (h22 = 1) with
// partial pivoting, after Hartley normalization of both point sets.
Mat3 solve_homography(const std::array<std::array<double, 2>, 4>& src,
                      const std::array<std::array<double, 2>, 4>& dst) {
  auto normalizer = [](const std::array<std::array<double, 2>, 4>& pts) {
    double mx = 0, my = 0;
    for (const auto& p : pts) { mx += p[0]; my += p[1]; }
    mx /= 4; my /= 4;
    double dist = 0;
    for (const auto& p : pts)
      dist += std::hypot(p[0] - mx, p[1] - my);
    dist /= 4;
    double s = dist > 0 ? std::sqrt(2.0) / dist : 1.0;
    Mat3 t = Mat3::identity();
    t(0, 0) = s; t(0, 2) = -s * mx;
    t(1, 1) = s; t(1, 2) = -s * my;
    return t;
  };
  Mat3 ts = normalizer(src);
  Mat3 td = normalizer(dst);
  auto apply = [](const Mat3& t, const std::array<double, 2>& p) {
    Vec3 v = t * Vec3{p[0], p[1], 1.0};
    return std::array<double, 2>{v.x / v.z, v.y / v.z};
  };

  double a[8][9] = {};
  for (int i = 0; i < 4; ++i) {
    auto s = apply(ts, src[size_t(i)]);
    auto d = apply(td, dst[size_t(i)]);
    double u = s[0], v = s[1], up = d[0], vp = d[1];
    double* r0 = a[2 * i];
    double* r1 = a[2 * i + 1];
    r0[0] = u; r0[1] = v; r0[2] = 1;
    r0[6] = -u * up; r0[7] = -v * up; r0[8] = up;
    r1[3] = u; r1[4] = v; r1[5] = 1;
    r1[6] = -u * vp; r1[7] = -v * vp; r1[8] = vp;
  }

  for (int col = 0; col < 8; ++col) {
    int pivot = col;
    for (int row = col + 1; row < 8; ++row)
      if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
    if (pivot != col)
      for (int k = 0; k < 9; ++k) std::swap(a[col][k], a[pivot][k]);
    require(std::abs(a[col][col]) > 1e-12, ErrorKind::degenerate,
            "degenerate correspondences for homography");
    for (int row = col + 1; row < 8; ++row) {
      double factor = a[row][col] / a[col][col];
      for (int k = col; k < 9; ++k) a[row][k] -= factor * a[col][k];
    }
  }
  double hcoef[8];
  for (int row = 7; row >= 0; --row) {
    double s = a[row][8];
    for (int k = row + 1; k < 8; ++k) s -= a[row][k] * hcoef[k];
    hcoef[row] = s / a[row][row];
  }
  Mat3 hn;
  hn.m = {hcoef[0], hcoef[1], hcoef[2], hcoef[3], hcoef[4], hcoef[5],
          hcoef[6], hcoef[7], 1.0};
  Mat3 h = td.inverse() * hn * ts;
  // Scale so h(2,2) = 1 when possible, for stable comparisons.
  if (std::abs(h(2, 2)) > 1e-12) {
    for (double& v : h.m) v /= h.m[8];
  }
  return h;
}

double triangle_area2(const std::array<double, 2>& a, const std::array<double, 2>& b,
                      const std::array<double, 2>& c) {
  return std::abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
}

void require_non_collinear(const std::array<std::array<double, 2>, 4>& pts,
                           const char* what) {
  double scale = 0;
  for (const auto& p : pts) scale = std::max({scale, std::abs(p[0]), std::abs(p[1])});
  double tol = 1e-9 * std::max(1.0, scale * scale);
  static const int triples[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  for (const auto& t : triples) {
    require(triangle_area2(pts[size_t(t[0])], pts[size_t(t[1])], pts[size_t(t[2])]) > tol,
            ErrorKind::degenerate, std::string(what) + " corner points are collinear");
  }
}

}  // namespace

Mat3 homography_from_corners(const Corners& src, const Corners& dst) {
  require_non_collinear(src.pts, "source");
  require_non_collinear(dst.pts, "destination");
  return solve_homography(src.pts, dst.pts);
}

TimeMap warp_time_map(const TimeMap& map, const Mat3& homography, int out_width,
                      int out_height) {
  Mat3 inv = homography.inverse();  // throws when singular
  TimeMap out(out_width, out_height);
  const double kSnap = 1e-9;
  for (int y = 0; y < out_height; ++y) {
    for (int x = 0; x < out_width; ++x) {
      Vec3 s = inv * Vec3{double(x), double(y), 1.0};
      if (std::abs(s.z) < 1e-12) continue;
      double sx = s.x / s.z;
      double sy = s.y / s.z;
      if (sx < 0 || sy < 0 || sx > map.width() - 1 || sy > map.height() - 1) continue;
      int x0 = int(std::floor(sx));
      int y0 = int(std::floor(sy));
      double fx = sx - x0;
      double fy = sy - y0;
      if (fx < kSnap) fx = 0;
      if (fy < kSnap) fy = 0;
      if (1 - fx < kSnap && x0 + 1 <= map.width() - 1) { fx = 0; ++x0; }
      if (1 - fy < kSnap && y0 + 1 <= map.height() - 1) { fy = 0; ++y0; }
      int x1 = fx > 0 ? x0 + 1 : x0;
      int y1 = fy > 0 ? y0 + 1 : y0;
      if (x1 > map.width() - 1 || y1 > map.height() - 1) continue;
      if (!map.defined(x0, y0) || !map.defined(x1, y0) || !map.defined(x0, y1) ||
          !map.defined(x1, y1))
        continue;
      double v00 = map.at(x0, y0);
      double v10 = map.at(x1, y0);
      double v01 = map.at(x0, y1);
      double v11 = map.at(x1, y1);
      double v = (1 - fy) * ((1 - fx) * v00 + fx * v10) + fy * ((1 - fx) * v01 + fx * v11);
      out.set(x, y, float(std::clamp(v, 0.0, 1.0)));
    }
  }
  return out;
}

TimeMap interpolate_rows(const TimeMap& map) {
  TimeMap out = map;
  for (int y = 0; y < map.height(); ++y) {
    int prev = -1;
    for (int x = 0; x < map.width(); ++x) {
      if (!map.defined(x, y)) continue;
      if (prev >= 0 && x - prev > 1) {
        double v0 = map.at(prev, y);
        double v1 = map.at(x, y);
        for (int i = prev + 1; i < x; ++i) {
          double f = double(i - prev) / double(x - prev);
          out.set(i, y, float(v0 + (v1 - v0) * f));
        }
      }
      prev = x;
    }
  }
  return out;
}

TimeMap calibrate_time_map(std::span<const TimeMap> planar_frames, int projector_width,
                           int projector_height) {
  require(!planar_frames.empty(), ErrorKind::empty_input,
          "calibration needs at least one planar time map");
  TimeMap averaged = average_normalized_time_maps(planar_frames);
  Corners observed = find_projection_corners(averaged);
  Corners target;
  target.pts = {{{0.0, 0.0},
                 {double(projector_width - 1), 0.0},
                 {double(projector_width - 1), double(projector_height - 1)},
                 {0.0, double(projector_height - 1)}}};
  Mat3 h = homography_from_corners(observed, target);
  TimeMap warped = warp_time_map(averaged, h, projector_width, projector_height);
  return interpolate_rows(warped);
}

}  // namespace xmaps
