#include "core/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace xmaps {

DepthImage::DepthImage(int width, int height) : width_(width), height_(height) {
  require(width > 0 && height > 0, ErrorKind::invalid_argument,
          "depth image dimensions must be positive");
  values_.assign(size_t(width) * size_t(height), std::numeric_limits<float>::quiet_NaN());
}

size_t DepthImage::defined_count() const {
  size_t n = 0;
  for (float v : values_)
    if (!std::isnan(v)) ++n;
  return n;
}

DepthImage render_depth_image(const DepthFrame& frame, int width, int height) {
  DepthImage image(width, height);
  for (size_t i = 0; i < frame.size(); ++i) {
    int x = int(std::floor(double(frame.x_r[i]) + 0.5));
    int y = int(std::floor(double(frame.y_r[i]) + 0.5));
    if (x < 0 || x >= width || y < 0 || y >= height) continue;
    float depth = frame.depth_m[i];
    if (!image.defined(x, y) || depth < image.at(x, y)) image.set(x, y, depth);
  }
  return image;
}

DepthImage depth_image_from_disparities(const DisparityMap& map,
                                        const StereoCalibration& calib) {
  DepthImage image(map.width(), map.height());
  double f_times_b = calib.rectified_focal() * calib.baseline();
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      if (!map.defined(x, y)) continue;
      double d = map.at(x, y);
      if (d <= 0) continue;
      image.set(x, y, float(f_times_b / d));
    }
  }
  return image;
}

double rmse_cm(const DepthImage& estimate, const DepthImage& reference) {
  require(estimate.width() == reference.width() && estimate.height() == reference.height(),
          ErrorKind::dimension_mismatch, "depth images must share dimensions");
  double sum_sq = 0;
  size_t n = 0;
  const auto est = estimate.values();
  const auto ref = reference.values();
  for (size_t i = 0; i < est.size(); ++i) {
    if (std::isnan(est[i]) || std::isnan(ref[i])) continue;
    double diff = double(est[i]) - double(ref[i]);
    sum_sq += diff * diff;
    ++n;
  }
  require(n > 0, ErrorKind::empty_input, "no cells defined in both depth images");
  return std::sqrt(sum_sq / double(n)) * 100.0;
}

double fill_rate(const DepthImage& estimate, const DepthImage& reference) {
  require(estimate.width() == reference.width() && estimate.height() == reference.height(),
          ErrorKind::dimension_mismatch, "depth images must share dimensions");
  const auto est = estimate.values();
  const auto ref = reference.values();
  double depth_sum = 0;
  size_t n_ref = 0;
  for (float v : ref) {
    if (!std::isnan(v)) {
      depth_sum += v;
      ++n_ref;
    }
  }
  require(n_ref > 0, ErrorKind::empty_input, "reference depth image is empty");
  double threshold = 0.01 * (depth_sum / double(n_ref));
  size_t hits = 0;
  for (size_t i = 0; i < ref.size(); ++i) {
    if (std::isnan(ref[i]) || std::isnan(est[i])) continue;
    if (std::abs(double(est[i]) - double(ref[i])) < threshold) ++hits;
  }
  return double(hits) / double(n_ref);
}

namespace {

// Smallest eigenpair of a symmetric 3x3 matrix (closed-form eigenvalues,
// eigenvector via cross products).
std::pair<double, Vec3> smallest_eigenpair(const Mat3& a) {
  double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  double q = (a(0, 0) + a(1, 1) + a(2, 2)) / 3.0;
  double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) +
              (a(2, 2) - q) * (a(2, 2) - q) + 2.0 * p1;
  double p = std::sqrt(std::max(p2 / 6.0, 0.0));
  double eig;
  if (p < 1e-300) {
    eig = q;  // a is (near) a multiple of the identity
  } else {
    Mat3 b;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) b(i, j) = (a(i, j) - (i == j ? q : 0.0)) / p;
    double r = b.determinant() / 2.0;
    r = std::clamp(r, -1.0, 1.0);
    constexpr double kPi = 3.14159265358979323846;
    double phi = std::acos(r) / 3.0;
    double eig1 = q + 2.0 * p * std::cos(phi);                       // largest
    double eig3 = q + 2.0 * p * std::cos(phi + 2.0 * kPi / 3.0);     // smallest
    double eig2 = 3.0 * q - eig1 - eig3;
    (void)eig2;
    eig = eig3;
  }
  // Eigenvector from the cross product of two rows of (a - eig I).
  Mat3 shifted = a;
  for (int i = 0; i < 3; ++i) shifted(i, i) -= eig;
  Vec3 r0{shifted(0, 0), shifted(0, 1), shifted(0, 2)};
  Vec3 r1{shifted(1, 0), shifted(1, 1), shifted(1, 2)};
  Vec3 r2{shifted(2, 0), shifted(2, 1), shifted(2, 2)};
  Vec3 c01 = r0.cross(r1);
  Vec3 c02 = r0.cross(r2);
  Vec3 c12 = r1.cross(r2);
  Vec3 best = c01;
  if (c02.dot(c02) > best.dot(best)) best = c02;
  if (c12.dot(c12) > best.dot(best)) best = c12;
  return {eig, best};
}

}  // namespace

double plane_fit_rmse_cm(std::span<const Vec3> points) {
  require(points.size() >= 3, ErrorKind::degenerate,
          "plane fit needs at least 3 points");
  Vec3 centroid{};
  for (const Vec3& p : points) centroid = centroid + p;
  centroid = centroid * (1.0 / double(points.size()));
  Mat3 cov;
  cov.m = {0, 0, 0, 0, 0, 0, 0, 0, 0};
  for (const Vec3& p : points) {
    Vec3 d = p - centroid;
    cov(0, 0) += d.x * d.x; cov(0, 1) += d.x * d.y; cov(0, 2) += d.x * d.z;
    cov(1, 1) += d.y * d.y; cov(1, 2) += d.y * d.z;
    cov(2, 2) += d.z * d.z;
  }
  cov(1, 0) = cov(0, 1);
  cov(2, 0) = cov(0, 2);
  cov(2, 1) = cov(1, 2);

  auto [lambda_min, normal] = smallest_eigenpair(cov);
  double norm = normal.norm();
  double trace = cov(0, 0) + cov(1, 1) + cov(2, 2);
  require(norm > 1e-12 * std::max(1.0, trace), ErrorKind::degenerate,
          "points are collinear; plane is underdetermined");
  double mean_sq = std::max(lambda_min, 0.0) / double(points.size());
  return std::sqrt(mean_sq) * 100.0;
}

std::vector<Vec3> depth_frame_points(const DepthFrame& frame,
                                     const StereoCalibration& calib) {
  std::vector<Vec3> points;
  points.reserve(frame.size());
  for (size_t i = 0; i < frame.size(); ++i) {
    points.push_back(event_to_3d(frame.x_r[i], frame.y_r[i], frame.disparity_px[i], calib));
  }
  return points;
}

EvalReport evaluate(const DepthImage& estimate, const DepthImage& reference,
                    const DepthFrame* frame, const StereoCalibration* calib) {
  EvalReport report;
  report.rmse_cm = rmse_cm(estimate, reference);
  report.fill_rate = fill_rate(estimate, reference);
  const auto est = estimate.values();
  const auto ref = reference.values();
  size_t n = 0;
  double depth_sum = 0;
  size_t n_ref = 0;
  for (size_t i = 0; i < ref.size(); ++i) {
    if (!std::isnan(ref[i])) {
      depth_sum += ref[i];
      ++n_ref;
    }
    if (!std::isnan(ref[i]) && !std::isnan(est[i])) ++n;
  }
  report.n_compared = n;
  report.mean_scene_depth_m = n_ref > 0 ? depth_sum / double(n_ref) : 0.0;
  if (frame != nullptr) {
    report.discard_counts = frame->discarded;
    if (calib != nullptr && frame->size() >= 3) {
      auto points = depth_frame_points(*frame, *calib);
      report.plane_fit_rmse_cm = plane_fit_rmse_cm(points);
    }
  }
  return report;
}

}  // namespace xmaps
