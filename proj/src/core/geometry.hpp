#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

namespace xmaps {

class TimeMap;

struct Vec3 {
  double x = 0, y = 0, z = 0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const;
  Vec3 normalized() const;
};

struct Mat3 {
  // Row-major.
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Mat3 identity() { return {}; }
  static Mat3 from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2);

  double operator()(int r, int c) const { return m[size_t(r) * 3 + size_t(c)]; }
  double& operator()(int r, int c) { return m[size_t(r) * 3 + size_t(c)]; }

  Vec3 operator*(const Vec3& v) const;
  Mat3 operator*(const Mat3& o) const;
  Mat3 transposed() const;
  double determinant() const;
  // Throws ErrorKind::degenerate when singular.
  Mat3 inverse() const;
};

struct PinholeIntrinsics {
  double fx = 0, fy = 0, cx = 0, cy = 0;
  int width = 0, height = 0;

  void validate() const;

  // Projects a camera-frame point (z > 0) to pixel coordinates.
  std::pair<double, double> project(const Vec3& p) const {
    return {fx * p.x / p.z + cx, fy * p.y / p.z + cy};
  }
  // Unit-z ray through a pixel.
  Vec3 ray(double x, double y) const { return {(x - cx) / fx, (y - cy) / fy, 1.0}; }
};

// Stereo pair of camera and (tilted) projector. Extrinsics follow the usual
// stereo-calibration convention: p_projector = rotation * p_camera + translation.
struct StereoCalibration {
  PinholeIntrinsics camera;
  PinholeIntrinsics projector;
  Mat3 rotation;
  Vec3 translation;  // meters

  double baseline() const { return translation.norm(); }
  // Shared rectified intrinsics: the camera's fx and principal point.
  double rectified_focal() const { return camera.fx; }
  double rectified_cx() const { return camera.cx; }
  double rectified_cy() const { return camera.cy; }

  void validate() const;
};

// Analytic rectifying transforms. Both views share one rectified orientation
// whose x axis is the baseline, and the shared rectified intrinsics above, so
// corresponding points land on the same rectified row and disparity is purely
// horizontal.
class Rectifier {
 public:
  explicit Rectifier(const StereoCalibration& calib);

  // Sub-pixel source coordinates -> rectified coordinates. nullopt when the
  // rotated ray points away from the rectified image plane.
  std::optional<std::pair<double, double>> camera_to_rectified(double x, double y) const;
  std::optional<std::pair<double, double>> projector_to_rectified(double x, double y) const;
  // Inverse of projector_to_rectified (used to resample projector-space maps).
  std::optional<std::pair<double, double>> rectified_to_projector(double xr, double yr) const;

  const Mat3& camera_rotation() const { return r_cam_; }
  const Mat3& projector_rotation() const { return r_proj_; }

 private:
  std::optional<std::pair<double, double>> apply(const Mat3& r, const Vec3& ray) const;

  StereoCalibration calib_;
  Mat3 r_cam_;   // camera frame -> rectified frame
  Mat3 r_proj_;  // projector frame -> rectified frame
  double f_, cx_, cy_;
};

// Dense per-source-pixel rectified coordinates; NaN marks out-of-view.
struct RectifyMap {
  int width = 0, height = 0;
  std::vector<float> map_x, map_y;

  bool defined(int x, int y) const;
  size_t index(int x, int y) const { return size_t(y) * size_t(width) + size_t(x); }
};

// Samples the analytic rectifier at every integer source pixel of both views.
// Throws ErrorKind::degenerate for a near-zero baseline.
std::pair<RectifyMap, RectifyMap> compute_rectification(const StereoCalibration& calib);

// Map lookup at an integer source pixel. Throws on out-of-bounds input;
// nullopt signals an out-of-view (undefined) entry.
std::optional<std::pair<double, double>> rectify_point(const RectifyMap& map, int x, int y);

// depth = rectified_focal * baseline / d. Throws for d <= 0 (the pipeline
// discards those upstream).
double disparity_to_depth(double disparity_px, const StereoCalibration& calib);

// Back-projects a rectified camera coordinate + disparity into the rectified
// camera frame: Z = f*B/d, X = (x_r - cx)*Z/f, Y = (y_r - cy)*Z/f.
Vec3 event_to_3d(double x_r, double y_r, double disparity_px, const StereoCalibration& calib);

// Resamples a projector-space time map onto the shared rectified grid, so
// that column indices of the result are rectified x coordinates. Bilinear
// sampling; a cell is defined only if every source cell with nonzero weight
// is defined.
TimeMap resample_time_map_to_rectified(const TimeMap& projector_map,
                                       const StereoCalibration& calib, int out_width,
                                       int out_height);

}  // namespace xmaps
