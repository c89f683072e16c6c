#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "core/events.hpp"
#include "core/geometry.hpp"
#include "core/timemap.hpp"
#include "core/xmap.hpp"

namespace xmaps {

// Parametric scenes expressed in the camera frame; every scene covers the
// entire projector frustum so each laser ray has a well-defined hit.
struct PlaneScene {
  double depth_m = 1.0;  // fronto-parallel plane z = depth
};

struct StaircaseScene {
  std::vector<double> depths_m;  // one fronto-parallel depth per step
  double x0_m = 0.0;             // world-x start of step 1 (step 0 extends left)
  double step_width_m = 0.1;
};

struct SphereScene {
  Vec3 center{0, 0, 1.0};
  double radius_m = 0.2;
  double background_depth_m = 1.5;  // plane behind the sphere
};

struct HeightfieldScene {
  int cols = 0, rows = 0;
  std::vector<double> depths_m;  // row-major z over the (x, y) world grid
  double x0_m = 0, y0_m = 0;     // grid origin in world meters
  double dx_m = 0.1, dy_m = 0.1; // grid spacing
};

using Scene = std::variant<PlaneScene, StaircaseScene, SphereScene, HeightfieldScene>;

// Monotone time-of-scan-position model on [0,1] with fixed endpoints.
// coeffs are (c1, c2, c3) of f(s) = c1*s + c2*s^2 + c3*s^3 with sum 1;
// the default is the linear scan. Non-linear profiles model scanners that
// start slower than the ideal curve and finish faster.
struct SpeedModel {
  std::array<double, 3> coeffs{1.0, 0.0, 0.0};

  static SpeedModel linear() { return {}; }
  static SpeedModel quadratic(double bend);  // f(s) = (1-bend)*s + bend*s^2

  double eval(double s) const;
  double inverse(double t) const;  // bisection; eval is strictly monotone
  void validate() const;
};

struct ScanWindow {
  int x0 = 0, x1 = 0, y0 = 0, y1 = 0;  // half-open projector-pixel ranges
};

struct ScanProfile {
  ScanModel scan;  // rows == tilted projector width
  SpeedModel speed;
  double scan_fraction = 0.78;  // active scan share of the frame period
  double x_jitter_sigma_px = 0.0;
  double t_jitter_sigma_us = 0.0;
  uint64_t refractory_us = 0;
  double negative_event_rate = 0.0;
  double duplicate_rate = 0.0;
  std::optional<ScanWindow> window;  // defaults to the full projector grid

  void validate(const PinholeIntrinsics& projector) const;
  double frame_period_us() const { return 1e6 / scan.frame_rate_hz; }
  double scan_span_us() const { return scan_fraction * frame_period_us(); }
};

// One record per emitted event, index-aligned with the stream.
struct GroundTruthRecord {
  uint64_t emit_t_us = 0;  // pre-jitter emission time
  uint16_t proj_x = 0, proj_y = 0;
  double depth_m = 0;       // rectified-frame depth of the hit
  double disparity_px = 0;  // rectified projector x - rectified camera x
};

struct GroundTruth {
  std::vector<GroundTruthRecord> records;
  size_t n_positive = 0;
  size_t n_negative = 0;
  size_t n_duplicates = 0;
};

struct SimResult {
  EventStream events;
  GroundTruth truth;
};

// Generates the event stream of a raster-scanning laser projector observing
// `scene` for `frames` frames: scan lines traverse the tilted projector grid
// left to right, each hit is projected into the camera, jittered in camera
// pixel space, gated by the refractory period, and timestamped via the speed
// model over the active scan span. Deterministic for a fixed seed.
SimResult simulate(const Scene& scene, const StereoCalibration& calib,
                   const ScanProfile& profile, int frames, uint64_t seed);

// Analytic X-map implied by the speed model, bypassing event generation.
// Assumes the projector grid coincides with the rectified grid (the
// configuration used by the calibration tests).
XMap ideal_xmap_for(const ScanProfile& profile, const StereoCalibration& calib,
                    int time_columns = 0, int out_height = 0);

}  // namespace xmaps
