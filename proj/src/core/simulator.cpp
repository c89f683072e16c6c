#include "core/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "core/error.hpp"

namespace xmaps {

SpeedModel SpeedModel::quadratic(double bend) {
  SpeedModel m;
  m.coeffs = {1.0 - bend, bend, 0.0};
  m.validate();
  return m;
}

double SpeedModel::eval(double s) const {
  return s * (coeffs[0] + s * (coeffs[1] + s * coeffs[2]));
}

double SpeedModel::inverse(double t) const {
  if (t <= 0) return 0;
  if (t >= 1) return 1;
  double lo = 0, hi = 1;
  for (int i = 0; i < 60; ++i) {
    double mid = 0.5 * (lo + hi);
    (eval(mid) < t ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void SpeedModel::validate() const {
  double sum = coeffs[0] + coeffs[1] + coeffs[2];
  require(std::abs(sum - 1.0) <= 1e-9, ErrorKind::invalid_argument,
          "speed model endpoints must be fixed (coefficients sum to 1)");
  for (int i = 0; i <= 256; ++i) {
    double s = double(i) / 256.0;
    double slope = coeffs[0] + s * (2 * coeffs[1] + s * 3 * coeffs[2]);
    require(slope > 0, ErrorKind::invalid_argument, "speed model must be monotone");
  }
}

void ScanProfile::validate(const PinholeIntrinsics& projector) const {
  scan.validate();
  speed.validate();
  require(scan.rows == projector.width, ErrorKind::dimension_mismatch,
          "scan rows must equal the tilted projector width");
  require(scan_fraction > 0 && scan_fraction < 1, ErrorKind::invalid_argument,
          "scan fraction must lie in (0, 1)");
  require(negative_event_rate >= 0 && negative_event_rate <= 1 && duplicate_rate >= 0 &&
              duplicate_rate <= 1,
          ErrorKind::invalid_argument, "event rates must lie in [0, 1]");
  require(x_jitter_sigma_px >= 0 && t_jitter_sigma_us >= 0, ErrorKind::invalid_argument,
          "jitter sigmas must be non-negative");
  if (window) {
    require(window->x0 >= 0 && window->x0 < window->x1 && window->x1 <= projector.width &&
                window->y0 >= 0 && window->y0 < window->y1 &&
                window->y1 <= projector.height,
            ErrorKind::invalid_argument, "scan window outside projector grid");
  }
}

namespace {

// Depth (camera-frame z) of the scene surface hit by the ray
// origin + z * direction, where direction.z == 1.
struct RayHit {
  double z = 0;
};

double staircase_depth_at(const StaircaseScene& s, double x_world) {
  double idx = std::floor((x_world - s.x0_m) / s.step_width_m);
  long k = std::clamp(long(idx) + 1, long(0), long(s.depths_m.size()) - 1);
  return s.depths_m[size_t(k)];
}

RayHit intersect(const PlaneScene& s, const Vec3& origin, const Vec3& /*dir*/) {
  require(s.depth_m > origin.z, ErrorKind::invalid_argument,
          "scene does not cover the projector frustum");
  return {s.depth_m};
}

RayHit intersect(const StaircaseScene& s, const Vec3& origin, const Vec3& dir) {
  require(!s.depths_m.empty() && s.step_width_m > 0, ErrorKind::invalid_argument,
          "staircase scene needs steps");
  // Candidate intersection per step plane; keep the nearest whose world-x
  // lands inside that step (occlusion). Fall back to the step whose interval
  // is closest so every ray terminates.
  double best_z = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < s.depths_m.size(); ++k) {
    double z = s.depths_m[k];
    if (z <= origin.z) continue;
    double x = origin.x + (z - origin.z) * dir.x;
    double lo = k == 0 ? -std::numeric_limits<double>::infinity()
                       : s.x0_m + double(k - 1) * s.step_width_m;
    double hi = k + 1 == s.depths_m.size()
                    ? std::numeric_limits<double>::infinity()
                    : s.x0_m + double(k) * s.step_width_m;
    if (x >= lo && x < hi && z < best_z) best_z = z;
  }
  if (!std::isfinite(best_z)) {
    double z = staircase_depth_at(s, origin.x + (s.depths_m[0] - origin.z) * dir.x);
    require(z > origin.z, ErrorKind::invalid_argument,
            "scene does not cover the projector frustum");
    best_z = z;
  }
  return {best_z};
}

RayHit intersect(const SphereScene& s, const Vec3& origin, const Vec3& dir) {
  require(s.radius_m > 0 && s.background_depth_m > origin.z, ErrorKind::invalid_argument,
          "sphere scene needs a positive radius and a covering background");
  Vec3 oc = origin - s.center;
  double a = dir.dot(dir);
  double b = 2.0 * oc.dot(dir);
  double c = oc.dot(oc) - s.radius_m * s.radius_m;
  double disc = b * b - 4 * a * c;
  if (disc >= 0) {
    double t = (-b - std::sqrt(disc)) / (2 * a);
    double z = origin.z + t * dir.z;
    if (t > 0 && z > origin.z && z < s.background_depth_m) return {z};
  }
  return {s.background_depth_m};
}

double heightfield_depth(const HeightfieldScene& s, double x, double y) {
  double gx = std::clamp((x - s.x0_m) / s.dx_m, 0.0, double(s.cols - 1));
  double gy = std::clamp((y - s.y0_m) / s.dy_m, 0.0, double(s.rows - 1));
  int x0 = std::min(int(gx), s.cols - 2);
  int y0 = std::min(int(gy), s.rows - 2);
  if (s.cols == 1) x0 = 0;
  if (s.rows == 1) y0 = 0;
  double fx = gx - x0;
  double fy = gy - y0;
  auto at = [&](int cx, int cy) {
    cx = std::clamp(cx, 0, s.cols - 1);
    cy = std::clamp(cy, 0, s.rows - 1);
    return s.depths_m[size_t(cy) * size_t(s.cols) + size_t(cx)];
  };
  return (1 - fy) * ((1 - fx) * at(x0, y0) + fx * at(x0 + 1, y0)) +
         fy * ((1 - fx) * at(x0, y0 + 1) + fx * at(x0 + 1, y0 + 1));
}

RayHit intersect(const HeightfieldScene& s, const Vec3& origin, const Vec3& dir) {
  require(s.cols >= 1 && s.rows >= 1 &&
              s.depths_m.size() == size_t(s.cols) * size_t(s.rows),
          ErrorKind::invalid_argument, "heightfield grid is inconsistent");
  // Fixed-point iteration z <- g(x(z), y(z)); converges for gentle fields.
  double mean =
      std::accumulate(s.depths_m.begin(), s.depths_m.end(), 0.0) / double(s.depths_m.size());
  double z = mean;
  for (int i = 0; i < 24; ++i) {
    double x = origin.x + (z - origin.z) * dir.x;
    double y = origin.y + (z - origin.z) * dir.y;
    double next = heightfield_depth(s, x, y);
    if (std::abs(next - z) < 1e-9) { z = next; break; }
    z = next;
  }
  require(z > origin.z, ErrorKind::invalid_argument,
          "scene does not cover the projector frustum");
  return {z};
}

RayHit intersect_scene(const Scene& scene, const Vec3& origin, const Vec3& dir) {
  return std::visit([&](const auto& s) { return intersect(s, origin, dir); }, scene);
}

struct PendingEvent {
  uint64_t t_us;
  uint16_t x, y;
  uint8_t polarity;
  GroundTruthRecord truth;
};

}  // namespace

SimResult simulate(const Scene& scene, const StereoCalibration& calib,
                   const ScanProfile& profile, int frames, uint64_t seed) {
  calib.validate();
  profile.validate(calib.projector);
  require(frames > 0, ErrorKind::invalid_argument, "frame count must be positive");

  const PinholeIntrinsics& cam = calib.camera;
  const PinholeIntrinsics& proj = calib.projector;
  Rectifier rect(calib);
  // Projector center expressed in the camera frame.
  const Vec3 origin = (calib.rotation.transposed() * calib.translation) * -1.0;
  const Mat3 rot_t = calib.rotation.transposed();

  ScanWindow win = profile.window.value_or(ScanWindow{0, proj.width, 0, proj.height});
  const double span_us = profile.scan_span_us();
  const double period_us = profile.frame_period_us();
  const int w = proj.width;
  const int h = proj.height;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> x_noise(0.0, 1.0);
  std::normal_distribution<double> t_noise(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  EventStream stream(uint16_t(cam.width), uint16_t(cam.height));
  GroundTruth truth;
  std::vector<uint64_t> last_fire(size_t(cam.width) * size_t(cam.height), 0);
  std::vector<uint8_t> fired(size_t(cam.width) * size_t(cam.height), 0);

  std::vector<PendingEvent> frame_events;
  frame_events.reserve(size_t(win.x1 - win.x0) * size_t(win.y1 - win.y0));

  for (int frame = 0; frame < frames; ++frame) {
    const uint64_t frame_start = uint64_t(std::llround(double(frame) * period_us));
    frame_events.clear();

    for (int px = win.x0; px < win.x1; ++px) {
      for (int py = win.y0; py < win.y1; ++py) {
        // Normalized scan position of pixel (px, py) in tilted order.
        double s = (double(px) + double(py) / double(h)) / double(w);
        double t_norm = profile.speed.eval(s);
        uint64_t emit_t = frame_start + uint64_t(std::llround(t_norm * span_us));

        Vec3 dir = rot_t * proj.ray(px, py);
        require(dir.z > 1e-12, ErrorKind::invalid_argument,
                "projector ray parallel to the image plane");
        dir = dir * (1.0 / dir.z);  // normalize so that z(s) = origin.z + s
        RayHit hit = intersect_scene(scene, origin, dir);
        Vec3 p{origin.x + (hit.z - origin.z) * dir.x,
               origin.y + (hit.z - origin.z) * dir.y, hit.z};

        auto cam_px = cam.project(p);
        double x_c = cam_px.first;
        double y_c = cam_px.second;
        if (profile.x_jitter_sigma_px > 0)
          x_c += profile.x_jitter_sigma_px * x_noise(rng);
        uint64_t t = emit_t;
        if (profile.t_jitter_sigma_us > 0) {
          double dt = profile.t_jitter_sigma_us * t_noise(rng);
          double jittered = std::clamp(double(emit_t) + dt, double(frame_start),
                                       double(frame_start) + span_us);
          t = uint64_t(std::llround(jittered));
        }
        long ix = std::lround(x_c);
        long iy = std::lround(y_c);
        if (ix < 0 || ix >= cam.width || iy < 0 || iy >= cam.height) continue;

        // Ground truth in the shared rectified frame.
        auto p_rect_cam = rect.camera_to_rectified(x_c, y_c);
        auto p_rect_proj = rect.projector_to_rectified(px, py);
        if (!p_rect_cam || !p_rect_proj) continue;
        Vec3 p_rect = rect.camera_rotation() * p;
        GroundTruthRecord rec;
        rec.emit_t_us = emit_t;
        rec.proj_x = uint16_t(px);
        rec.proj_y = uint16_t(py);
        rec.depth_m = p_rect.z;
        rec.disparity_px = p_rect_proj->first - p_rect_cam->first;

        PendingEvent ev{t, uint16_t(ix), uint16_t(iy), 1, rec};
        frame_events.push_back(ev);

        if (profile.duplicate_rate > 0 && unit(rng) < profile.duplicate_rate) {
          PendingEvent dup = ev;
          dup.t_us = ev.t_us + 1;
          frame_events.push_back(dup);
          ++truth.n_duplicates;
        }
        if (profile.negative_event_rate > 0 && unit(rng) < profile.negative_event_rate) {
          PendingEvent neg = ev;
          neg.t_us = ev.t_us + 2;
          neg.polarity = 0;
          frame_events.push_back(neg);
        }
      }
    }

    std::stable_sort(frame_events.begin(), frame_events.end(),
                     [](const PendingEvent& a, const PendingEvent& b) {
                       return a.t_us < b.t_us;
                     });

    for (const PendingEvent& ev : frame_events) {
      if (profile.refractory_us > 0) {
        size_t idx = size_t(ev.y) * size_t(cam.width) + size_t(ev.x);
        if (fired[idx] && ev.t_us - last_fire[idx] < profile.refractory_us) continue;
        fired[idx] = 1;
        last_fire[idx] = ev.t_us;
      }
      stream.append(Event{ev.t_us, ev.x, ev.y, ev.polarity});
      truth.records.push_back(ev.truth);
      if (ev.polarity) ++truth.n_positive; else ++truth.n_negative;
    }
  }
  return {std::move(stream), std::move(truth)};
}

XMap ideal_xmap_for(const ScanProfile& profile, const StereoCalibration& calib,
                    int time_columns, int out_height) {
  calib.validate();
  profile.validate(calib.projector);
  const int w = calib.projector.width;
  const int h = calib.projector.height;
  if (time_columns == 0) time_columns = w;
  if (out_height == 0) out_height = h;
  XMap xmap(out_height, time_columns);
  const double threshold = 2.0 / double(w);
  auto value_at = [&](int x, int y) {
    return profile.speed.eval((double(x) + double(y) / double(h)) / double(w));
  };
  for (int y = 0; y < out_height; ++y) {
    int clamped_y = std::min(y, h - 1);
    for (int k = 0; k < time_columns; ++k) {
      double t = (double(k) + 0.5) / double(time_columns);
      // Continuous inverse of the per-row time profile, then the better of
      // the two neighbouring columns (ties toward the smaller x).
      double x_cont = profile.speed.inverse(t) * double(w) - double(clamped_y) / double(h);
      int x0 = std::clamp(int(std::floor(x_cont)), 0, w - 1);
      int x1 = std::clamp(x0 + 1, 0, w - 1);
      double d0 = std::abs(t - value_at(x0, clamped_y));
      double d1 = std::abs(t - value_at(x1, clamped_y));
      int best = d1 < d0 ? x1 : x0;
      double best_d = std::min(d0, d1);
      if (best_d <= threshold) xmap.set(y, k, float(best));
    }
  }
  return xmap;
}

}  // namespace xmaps
