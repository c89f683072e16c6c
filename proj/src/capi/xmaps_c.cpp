#include "xmaps/xmaps.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

#include "core/bench.hpp"
#include "core/error.hpp"
#include "core/events.hpp"
#include "core/geometry.hpp"
#include "core/io.hpp"
#include "core/metrics.hpp"
#include "core/oracle.hpp"
#include "core/simulator.hpp"
#include "core/timemap.hpp"
#include "core/trigger.hpp"
#include "core/xmap.hpp"

struct xm_events { xmaps::EventStream v; };
struct xm_calib { xmaps::StereoCalibration v; };
struct xm_rectmap { xmaps::RectifyMap v; };
struct xm_timemap { xmaps::TimeMap v; };
struct xm_xmap { xmaps::XMap v; };
struct xm_depth_frame { xmaps::DepthFrame v; };
struct xm_disparity_map { xmaps::DisparityMap v; };
struct xm_depth_image { xmaps::DepthImage v; };
struct xm_sim { xmaps::SimResult v; };

namespace {

thread_local std::string g_last_error;

xm_status to_status(xmaps::ErrorKind kind) {
  using K = xmaps::ErrorKind;
  switch (kind) {
    case K::invalid_argument: return XM_ERR_INVALID_ARGUMENT;
    case K::degenerate: return XM_ERR_DEGENERATE;
    case K::dimension_mismatch: return XM_ERR_DIMENSION_MISMATCH;
    case K::out_of_bounds: return XM_ERR_OUT_OF_BOUNDS;
    case K::empty_input: return XM_ERR_EMPTY_INPUT;
    case K::io: return XM_ERR_IO;
    case K::bad_magic: return XM_ERR_BAD_MAGIC;
    case K::truncated: return XM_ERR_TRUNCATED;
    case K::unsorted: return XM_ERR_UNSORTED;
    case K::bad_format: return XM_ERR_BAD_FORMAT;
  }
  return XM_ERR_INTERNAL;
}

template <typename F>
xm_status wrap(F&& f) noexcept {
  try {
    f();
    return XM_OK;
  } catch (const xmaps::Error& e) {
    g_last_error = e.what();
    return to_status(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return XM_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return XM_ERR_INTERNAL;
  }
}

void check(bool ok, const char* message) {
  xmaps::require(ok, xmaps::ErrorKind::invalid_argument, message);
}

xmaps::PinholeIntrinsics from_c(const xm_pinhole& p) {
  return {p.fx, p.fy, p.cx, p.cy, p.width, p.height};
}

xm_pinhole to_c(const xmaps::PinholeIntrinsics& p) {
  return {p.fx, p.fy, p.cx, p.cy, p.width, p.height};
}

xmaps::Scene scene_from_c(const xm_scene& s) {
  switch (s.kind) {
    case XM_SCENE_PLANE:
      return xmaps::PlaneScene{s.plane_depth_m};
    case XM_SCENE_STAIRCASE: {
      check(s.step_depths_m != nullptr && s.n_steps > 0, "staircase needs step depths");
      xmaps::StaircaseScene st;
      st.depths_m.assign(s.step_depths_m, s.step_depths_m + s.n_steps);
      st.x0_m = s.step_origin_x_m;
      st.step_width_m = s.step_width_m;
      return st;
    }
    case XM_SCENE_SPHERE: {
      xmaps::SphereScene sp;
      sp.center = {s.sphere_center[0], s.sphere_center[1], s.sphere_center[2]};
      sp.radius_m = s.sphere_radius_m;
      sp.background_depth_m = s.background_depth_m;
      return sp;
    }
    case XM_SCENE_HEIGHTFIELD: {
      check(s.heightfield_m != nullptr && s.hf_cols > 0 && s.hf_rows > 0,
            "heightfield needs a grid");
      xmaps::HeightfieldScene hf;
      hf.cols = s.hf_cols;
      hf.rows = s.hf_rows;
      hf.depths_m.assign(s.heightfield_m,
                         s.heightfield_m + size_t(s.hf_cols) * size_t(s.hf_rows));
      hf.x0_m = s.hf_x0_m;
      hf.y0_m = s.hf_y0_m;
      hf.dx_m = s.hf_dx_m;
      hf.dy_m = s.hf_dy_m;
      return hf;
    }
  }
  xmaps::fail(xmaps::ErrorKind::invalid_argument, "unknown scene kind");
}

xmaps::ScanProfile profile_from_c(const xm_scan_profile& p,
                                  const xmaps::StereoCalibration& calib) {
  xmaps::ScanProfile out;
  int rows = p.scan_rows > 0 ? p.scan_rows : calib.projector.width;
  double rate = p.frame_rate_hz > 0 ? p.frame_rate_hz : 60.0;
  out.scan = xmaps::ScanModel::from_rate(rows, rate);
  double sum = p.speed_coeffs[0] + p.speed_coeffs[1] + p.speed_coeffs[2];
  if (sum != 0.0) {
    out.speed.coeffs = {p.speed_coeffs[0], p.speed_coeffs[1], p.speed_coeffs[2]};
  }
  out.scan_fraction = p.scan_fraction > 0 ? p.scan_fraction : 0.78;
  out.x_jitter_sigma_px = p.x_jitter_sigma_px;
  out.t_jitter_sigma_us = p.t_jitter_sigma_us;
  out.refractory_us = p.refractory_us;
  out.negative_event_rate = p.negative_event_rate;
  out.duplicate_rate = p.duplicate_rate;
  if (p.window_x0 != 0 || p.window_x1 != 0 || p.window_y0 != 0 || p.window_y1 != 0) {
    out.window = xmaps::ScanWindow{p.window_x0, p.window_x1, p.window_y0, p.window_y1};
  }
  return out;
}

xmaps::FrameSlice slice_from_c(const xm_frame_slice& s) {
  return {s.start_t_us, s.end_t_us, s.begin_index, s.end_index};
}

std::span<const xmaps::Event> slice_events(const xmaps::EventStream& stream,
                                           const xmaps::FrameSlice& slice) {
  check(slice.begin_index <= slice.end_index && slice.end_index <= stream.size(),
        "frame slice indices outside the event stream");
  return stream.span().subspan(slice.begin_index, slice.end_index - slice.begin_index);
}

}  // namespace

extern "C" {

const char* xm_version(void) { return "0.1.0"; }

const char* xm_status_name(xm_status status) {
  switch (status) {
    case XM_OK: return "ok";
    case XM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case XM_ERR_DEGENERATE: return "degenerate input";
    case XM_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case XM_ERR_OUT_OF_BOUNDS: return "out of bounds";
    case XM_ERR_EMPTY_INPUT: return "empty input";
    case XM_ERR_IO: return "i/o error";
    case XM_ERR_BAD_MAGIC: return "bad magic";
    case XM_ERR_TRUNCATED: return "truncated file";
    case XM_ERR_UNSORTED: return "unsorted timestamps";
    case XM_ERR_BAD_FORMAT: return "bad format";
    case XM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* xm_error_message(void) { return g_last_error.c_str(); }

void xm_events_free(xm_events* h) { delete h; }
void xm_calib_free(xm_calib* h) { delete h; }
void xm_rectmap_free(xm_rectmap* h) { delete h; }
void xm_timemap_free(xm_timemap* h) { delete h; }
void xm_xmap_free(xm_xmap* h) { delete h; }
void xm_depth_frame_free(xm_depth_frame* h) { delete h; }
void xm_disparity_map_free(xm_disparity_map* h) { delete h; }
void xm_depth_image_free(xm_depth_image* h) { delete h; }
void xm_sim_free(xm_sim* h) { delete h; }

/* ----- events ----- */

xm_status xm_events_create(uint16_t sensor_width, uint16_t sensor_height,
                           const xm_event* events, size_t count, xm_events** out) {
  return wrap([&] {
    check(out != nullptr && (events != nullptr || count == 0), "null argument");
    std::vector<xmaps::Event> v;
    v.reserve(count);
    for (size_t i = 0; i < count; ++i)
      v.push_back({events[i].t_us, events[i].x, events[i].y, events[i].polarity});
    *out = new xm_events{
        xmaps::EventStream::from_events(sensor_width, sensor_height, std::move(v))};
  });
}

xm_status xm_events_read(const char* path, xm_events** out) {
  return wrap([&] {
    check(path != nullptr && out != nullptr, "null argument");
    *out = new xm_events{xmaps::read_events(path)};
  });
}

xm_status xm_events_write(const xm_events* events, const char* path,
                          xm_event_format format) {
  return wrap([&] {
    check(events != nullptr && path != nullptr, "null argument");
    xmaps::write_events(path, events->v,
                        format == XM_EVENTS_CSV ? xmaps::EventFileFormat::csv
                                                : xmaps::EventFileFormat::binary);
  });
}

xm_status xm_events_count(const xm_events* events, size_t* out) {
  return wrap([&] {
    check(events != nullptr && out != nullptr, "null argument");
    *out = events->v.size();
  });
}

xm_status xm_events_sensor_size(const xm_events* events, uint16_t* width,
                                uint16_t* height) {
  return wrap([&] {
    check(events != nullptr && width != nullptr && height != nullptr, "null argument");
    *width = events->v.sensor_width();
    *height = events->v.sensor_height();
  });
}

xm_status xm_events_get(const xm_events* events, size_t index, xm_event* out) {
  return wrap([&] {
    check(events != nullptr && out != nullptr, "null argument");
    xmaps::require(index < events->v.size(), xmaps::ErrorKind::out_of_bounds,
                   "event index out of range");
    const xmaps::Event& e = events->v.events()[index];
    *out = {e.t_us, e.x, e.y, e.polarity};
  });
}

xm_status xm_events_filter_positive(const xm_events* events, xm_events** out) {
  return wrap([&] {
    check(events != nullptr && out != nullptr, "null argument");
    *out = new xm_events{xmaps::filter_positive(events->v)};
  });
}

xm_status xm_events_dedup(const xm_events* frame_events, xm_dedup_mode mode,
                          xm_events** out) {
  return wrap([&] {
    check(frame_events != nullptr && out != nullptr, "null argument");
    *out = new xm_events{xmaps::dedup_coordinates(
        frame_events->v, mode == XM_DEDUP_KEEP_ALL ? xmaps::DedupMode::keep_all
                                                   : xmaps::DedupMode::keep_first)};
  });
}

/* ----- frame triggers ----- */

xm_trigger_config xm_trigger_config_default(void) {
  xmaps::TriggerConfig cfg;
  return {cfg.max_intra_frame_gap_us, cfg.min_frame_span_us, cfg.batch_span_us};
}

xm_status xm_split_frames(const xm_events* events, const xm_trigger_config* cfg,
                          xm_frame_slice* slices, size_t capacity, size_t* count) {
  return wrap([&] {
    check(events != nullptr && count != nullptr, "null argument");
    xmaps::TriggerConfig c;
    if (cfg != nullptr)
      c = {cfg->max_intra_frame_gap_us, cfg->min_frame_span_us, cfg->batch_span_us};
    auto result = xmaps::split_frames(events->v, c);
    *count = result.size();
    if (slices != nullptr) {
      xmaps::require(capacity >= result.size(), xmaps::ErrorKind::out_of_bounds,
                     "slice buffer too small");
      for (size_t i = 0; i < result.size(); ++i) {
        slices[i] = {result[i].start_t_us, result[i].end_t_us, result[i].begin_index,
                     result[i].end_index};
      }
    }
  });
}

/* ----- calibration / rectification ----- */

xm_status xm_calib_create(const xm_pinhole* camera, const xm_pinhole* projector,
                          const double rotation[9], const double translation[3],
                          xm_calib** out) {
  return wrap([&] {
    check(camera != nullptr && projector != nullptr && rotation != nullptr &&
              translation != nullptr && out != nullptr,
          "null argument");
    xmaps::StereoCalibration calib;
    calib.camera = from_c(*camera);
    calib.projector = from_c(*projector);
    std::memcpy(calib.rotation.m.data(), rotation, 9 * sizeof(double));
    calib.translation = {translation[0], translation[1], translation[2]};
    calib.validate();
    *out = new xm_calib{calib};
  });
}

xm_status xm_calib_read(const char* path, xm_calib** out) {
  return wrap([&] {
    check(path != nullptr && out != nullptr, "null argument");
    *out = new xm_calib{xmaps::read_calibration(path)};
  });
}

xm_status xm_calib_write(const xm_calib* calib, const char* path) {
  return wrap([&] {
    check(calib != nullptr && path != nullptr, "null argument");
    xmaps::write_calibration(path, calib->v);
  });
}

xm_status xm_calib_camera(const xm_calib* calib, xm_pinhole* out) {
  return wrap([&] {
    check(calib != nullptr && out != nullptr, "null argument");
    *out = to_c(calib->v.camera);
  });
}

xm_status xm_calib_projector(const xm_calib* calib, xm_pinhole* out) {
  return wrap([&] {
    check(calib != nullptr && out != nullptr, "null argument");
    *out = to_c(calib->v.projector);
  });
}

xm_status xm_calib_baseline(const xm_calib* calib, double* meters) {
  return wrap([&] {
    check(calib != nullptr && meters != nullptr, "null argument");
    *meters = calib->v.baseline();
  });
}

xm_status xm_calib_rectified_focal(const xm_calib* calib, double* pixels) {
  return wrap([&] {
    check(calib != nullptr && pixels != nullptr, "null argument");
    *pixels = calib->v.rectified_focal();
  });
}

xm_status xm_compute_rectification(const xm_calib* calib, xm_rectmap** camera_map,
                                   xm_rectmap** projector_map) {
  return wrap([&] {
    check(calib != nullptr && camera_map != nullptr && projector_map != nullptr,
          "null argument");
    auto [cam, proj] = xmaps::compute_rectification(calib->v);
    *camera_map = new xm_rectmap{std::move(cam)};
    *projector_map = new xm_rectmap{std::move(proj)};
  });
}

xm_status xm_rectmap_size(const xm_rectmap* map, int32_t* width, int32_t* height) {
  return wrap([&] {
    check(map != nullptr && width != nullptr && height != nullptr, "null argument");
    *width = map->v.width;
    *height = map->v.height;
  });
}

xm_status xm_rectmap_lookup(const xm_rectmap* map, int32_t x, int32_t y, double* x_r,
                            double* y_r, int32_t* defined) {
  return wrap([&] {
    check(map != nullptr && x_r != nullptr && y_r != nullptr && defined != nullptr,
          "null argument");
    auto r = xmaps::rectify_point(map->v, x, y);
    if (r) {
      *x_r = r->first;
      *y_r = r->second;
      *defined = 1;
    } else {
      *x_r = std::numeric_limits<double>::quiet_NaN();
      *y_r = std::numeric_limits<double>::quiet_NaN();
      *defined = 0;
    }
  });
}

xm_status xm_disparity_to_depth(const xm_calib* calib, double disparity_px,
                                double* depth_m) {
  return wrap([&] {
    check(calib != nullptr && depth_m != nullptr, "null argument");
    *depth_m = xmaps::disparity_to_depth(disparity_px, calib->v);
  });
}

xm_status xm_event_to_3d(const xm_calib* calib, double x_r, double y_r,
                         double disparity_px, double point_xyz[3]) {
  return wrap([&] {
    check(calib != nullptr && point_xyz != nullptr, "null argument");
    xmaps::Vec3 p = xmaps::event_to_3d(x_r, y_r, disparity_px, calib->v);
    point_xyz[0] = p.x;
    point_xyz[1] = p.y;
    point_xyz[2] = p.z;
  });
}

/* ----- time maps ----- */

xm_status xm_timemap_read(const char* path, xm_timemap** out) {
  return wrap([&] {
    check(path != nullptr && out != nullptr, "null argument");
    *out = new xm_timemap{xmaps::read_time_map(path)};
  });
}

xm_status xm_timemap_write(const xm_timemap* map, const char* path) {
  return wrap([&] {
    check(map != nullptr && path != nullptr, "null argument");
    xmaps::write_time_map(path, map->v);
  });
}

xm_status xm_timemap_size(const xm_timemap* map, int32_t* width, int32_t* height) {
  return wrap([&] {
    check(map != nullptr && width != nullptr && height != nullptr, "null argument");
    *width = map->v.width();
    *height = map->v.height();
  });
}

xm_status xm_timemap_get(const xm_timemap* map, int32_t x, int32_t y, float* value,
                         int32_t* defined) {
  return wrap([&] {
    check(map != nullptr && value != nullptr && defined != nullptr, "null argument");
    xmaps::require(x >= 0 && x < map->v.width() && y >= 0 && y < map->v.height(),
                   xmaps::ErrorKind::out_of_bounds, "cell outside time map");
    *value = map->v.at(x, y);
    *defined = map->v.defined(x, y) ? 1 : 0;
  });
}

xm_status xm_build_camera_time_map(const xm_events* events, const xm_frame_slice* frame,
                                   xm_timemap** out) {
  return wrap([&] {
    check(events != nullptr && frame != nullptr && out != nullptr, "null argument");
    auto slice = slice_from_c(*frame);
    *out = new xm_timemap{xmaps::build_camera_time_map(
        slice_events(events->v, slice), slice, events->v.sensor_width(),
        events->v.sensor_height())};
  });
}

xm_status xm_ideal_projector_time_map(int32_t width, int32_t height, int32_t scan_rows,
                                      double frame_rate_hz, xm_ideal_variant variant,
                                      xm_timemap** out) {
  return wrap([&] {
    check(out != nullptr, "null argument");
    auto scan = xmaps::ScanModel::from_rate(scan_rows > 0 ? scan_rows : width,
                                            frame_rate_hz > 0 ? frame_rate_hz : 60.0);
    *out = new xm_timemap{xmaps::ideal_projector_time_map(
        width, height, scan,
        variant == XM_IDEAL_FULL ? xmaps::IdealVariant::full
                                 : xmaps::IdealVariant::simple)};
  });
}

xm_status xm_average_time_maps(const xm_timemap* const* maps, size_t count,
                               xm_timemap** out) {
  return wrap([&] {
    check(maps != nullptr && out != nullptr, "null argument");
    std::vector<xmaps::TimeMap> owned;
    owned.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      check(maps[i] != nullptr, "null time map in list");
      owned.push_back(maps[i]->v);
    }
    *out = new xm_timemap{xmaps::average_normalized_time_maps(owned)};
  });
}

xm_status xm_find_projection_corners(const xm_timemap* map, double corners[8]) {
  return wrap([&] {
    check(map != nullptr && corners != nullptr, "null argument");
    xmaps::Corners c = xmaps::find_projection_corners(map->v);
    for (int i = 0; i < 4; ++i) {
      corners[2 * i] = c.pts[size_t(i)][0];
      corners[2 * i + 1] = c.pts[size_t(i)][1];
    }
  });
}

xm_status xm_homography_from_corners(const double src[8], const double dst[8],
                                     double homography[9]) {
  return wrap([&] {
    check(src != nullptr && dst != nullptr && homography != nullptr, "null argument");
    xmaps::Corners s, d;
    for (int i = 0; i < 4; ++i) {
      s.pts[size_t(i)] = {src[2 * i], src[2 * i + 1]};
      d.pts[size_t(i)] = {dst[2 * i], dst[2 * i + 1]};
    }
    xmaps::Mat3 h = xmaps::homography_from_corners(s, d);
    std::memcpy(homography, h.m.data(), 9 * sizeof(double));
  });
}

xm_status xm_warp_time_map(const xm_timemap* map, const double homography[9],
                           int32_t out_width, int32_t out_height, xm_timemap** out) {
  return wrap([&] {
    check(map != nullptr && homography != nullptr && out != nullptr, "null argument");
    xmaps::Mat3 h;
    std::memcpy(h.m.data(), homography, 9 * sizeof(double));
    *out = new xm_timemap{xmaps::warp_time_map(map->v, h, out_width, out_height)};
  });
}

xm_status xm_interpolate_rows(const xm_timemap* map, xm_timemap** out) {
  return wrap([&] {
    check(map != nullptr && out != nullptr, "null argument");
    *out = new xm_timemap{xmaps::interpolate_rows(map->v)};
  });
}

xm_status xm_calibrate_time_map(const xm_timemap* const* planar_frames, size_t count,
                                int32_t projector_width, int32_t projector_height,
                                xm_timemap** out) {
  return wrap([&] {
    check(planar_frames != nullptr && out != nullptr, "null argument");
    std::vector<xmaps::TimeMap> owned;
    owned.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      check(planar_frames[i] != nullptr, "null time map in list");
      owned.push_back(planar_frames[i]->v);
    }
    *out = new xm_timemap{
        xmaps::calibrate_time_map(owned, projector_width, projector_height)};
  });
}

xm_status xm_resample_time_map_rectified(const xm_timemap* projector_map,
                                         const xm_calib* calib, int32_t out_width,
                                         int32_t out_height, xm_timemap** out) {
  return wrap([&] {
    check(projector_map != nullptr && calib != nullptr && out != nullptr,
          "null argument");
    *out = new xm_timemap{xmaps::resample_time_map_to_rectified(
        projector_map->v, calib->v, out_width, out_height)};
  });
}

/* ----- X-maps / depth ----- */

xm_status xm_xmap_read(const char* path, xm_xmap** out) {
  return wrap([&] {
    check(path != nullptr && out != nullptr, "null argument");
    *out = new xm_xmap{xmaps::read_xmap(path)};
  });
}

xm_status xm_xmap_write(const xm_xmap* xmap, const char* path) {
  return wrap([&] {
    check(xmap != nullptr && path != nullptr, "null argument");
    xmaps::write_xmap(path, xmap->v);
  });
}

xm_status xm_xmap_size(const xm_xmap* xmap, int32_t* height, int32_t* time_columns) {
  return wrap([&] {
    check(xmap != nullptr && height != nullptr && time_columns != nullptr,
          "null argument");
    *height = xmap->v.height();
    *time_columns = xmap->v.time_columns();
  });
}

xm_status xm_xmap_get(const xm_xmap* xmap, int32_t y, int32_t column, float* projector_x,
                      int32_t* defined) {
  return wrap([&] {
    check(xmap != nullptr && projector_x != nullptr && defined != nullptr,
          "null argument");
    xmaps::require(y >= 0 && y < xmap->v.height() && column >= 0 &&
                       column < xmap->v.time_columns(),
                   xmaps::ErrorKind::out_of_bounds, "entry outside X-map");
    *projector_x = xmap->v.at(y, column);
    *defined = xmap->v.defined(y, column) ? 1 : 0;
  });
}

xm_status xm_build_projector_xmap(const xm_timemap* rectified_projector_map,
                                  int32_t projector_width, int32_t time_columns,
                                  xm_xmap** out) {
  return wrap([&] {
    check(rectified_projector_map != nullptr && out != nullptr, "null argument");
    *out = new xm_xmap{xmaps::build_projector_xmap(rectified_projector_map->v,
                                                   projector_width, time_columns)};
  });
}

xm_status xm_lookup_disparity(const xm_xmap* xmap, double x_cr, double y_cr,
                              uint64_t t_us, const xm_frame_slice* frame,
                              double* disparity_px, xm_discard_reason* reason) {
  return wrap([&] {
    check(xmap != nullptr && frame != nullptr && disparity_px != nullptr &&
              reason != nullptr,
          "null argument");
    auto r = xmaps::lookup_disparity(xmap->v, x_cr, y_cr, t_us, slice_from_c(*frame));
    *disparity_px = r.disparity;
    *reason = xm_discard_reason(r.reason);
  });
}

xm_status xm_depth_frame_compute(const xm_events* events, const xm_frame_slice* frame,
                                 const xm_xmap* xmap, const xm_rectmap* camera_rectify,
                                 const xm_calib* calib, xm_dedup_mode dedup,
                                 xm_depth_frame** out) {
  return wrap([&] {
    check(events != nullptr && frame != nullptr && xmap != nullptr &&
              camera_rectify != nullptr && calib != nullptr && out != nullptr,
          "null argument");
    auto slice = slice_from_c(*frame);
    *out = new xm_depth_frame{xmaps::depth_frame(
        slice_events(events->v, slice), slice, xmap->v, camera_rectify->v, calib->v,
        dedup == XM_DEDUP_KEEP_ALL ? xmaps::DedupMode::keep_all
                                   : xmaps::DedupMode::keep_first)};
  });
}

xm_status xm_depth_frame_count(const xm_depth_frame* frame, size_t* out) {
  return wrap([&] {
    check(frame != nullptr && out != nullptr, "null argument");
    *out = frame->v.size();
  });
}

xm_status xm_depth_frame_get(const xm_depth_frame* frame, size_t index,
                             xm_depth_point* out) {
  return wrap([&] {
    check(frame != nullptr && out != nullptr, "null argument");
    xmaps::require(index < frame->v.size(), xmaps::ErrorKind::out_of_bounds,
                   "point index out of range");
    out->x_r = frame->v.x_r[index];
    out->y_r = frame->v.y_r[index];
    out->disparity_px = frame->v.disparity_px[index];
    out->depth_m = frame->v.depth_m[index];
    out->t_us = frame->v.t_us[index];
  });
}

xm_status xm_depth_frame_discards(const xm_depth_frame* frame, size_t counts[4]) {
  return wrap([&] {
    check(frame != nullptr && counts != nullptr, "null argument");
    counts[0] = frame->v.n_input;
    for (int i = 1; i < 4; ++i) counts[i] = frame->v.discarded[size_t(i)];
  });
}

xm_status xm_depth_frame_span(const xm_depth_frame* frame, uint64_t* start_t_us,
                              uint64_t* end_t_us) {
  return wrap([&] {
    check(frame != nullptr && start_t_us != nullptr && end_t_us != nullptr,
          "null argument");
    *start_t_us = frame->v.start_t_us;
    *end_t_us = frame->v.end_t_us;
  });
}

xm_status xm_export_ply(const xm_depth_frame* frame, const xm_calib* calib,
                        const char* path) {
  return wrap([&] {
    check(frame != nullptr && calib != nullptr && path != nullptr, "null argument");
    xmaps::export_ply(path, frame->v, calib->v);
  });
}

/* ----- oracle ----- */

xm_status xm_rasterize_rectified_time_map(const xm_events* events,
                                          const xm_frame_slice* frame,
                                          const xm_rectmap* camera_rectify,
                                          int32_t width, int32_t height,
                                          xm_timemap** out) {
  return wrap([&] {
    check(events != nullptr && frame != nullptr && camera_rectify != nullptr &&
              out != nullptr,
          "null argument");
    auto slice = slice_from_c(*frame);
    *out = new xm_timemap{xmaps::rasterize_rectified_time_map(
        slice_events(events->v, slice), slice, camera_rectify->v, width, height)};
  });
}

xm_status xm_esl_init_search(const xm_timemap* camera_map, const xm_timemap* projector_map,
                             int32_t max_disparity, xm_disparity_map** out) {
  return wrap([&] {
    check(camera_map != nullptr && projector_map != nullptr && out != nullptr,
          "null argument");
    *out = new xm_disparity_map{
        xmaps::esl_init_search(camera_map->v, projector_map->v, max_disparity)};
  });
}

xm_status xm_disparity_map_size(const xm_disparity_map* map, int32_t* width,
                                int32_t* height) {
  return wrap([&] {
    check(map != nullptr && width != nullptr && height != nullptr, "null argument");
    *width = map->v.width();
    *height = map->v.height();
  });
}

xm_status xm_disparity_map_get(const xm_disparity_map* map, int32_t x, int32_t y,
                               float* disparity_px, int32_t* defined) {
  return wrap([&] {
    check(map != nullptr && disparity_px != nullptr && defined != nullptr,
          "null argument");
    xmaps::require(x >= 0 && x < map->v.width() && y >= 0 && y < map->v.height(),
                   xmaps::ErrorKind::out_of_bounds, "cell outside disparity map");
    *disparity_px = map->v.at(x, y);
    *defined = map->v.defined(x, y) ? 1 : 0;
  });
}

xm_status xm_compare_disparities(const xm_depth_frame* frame, const xm_disparity_map* map,
                                 double tol_px, xm_compare_stats* out) {
  return wrap([&] {
    check(frame != nullptr && map != nullptr && out != nullptr, "null argument");
    xmaps::CompareStats s = xmaps::compare_disparities(frame->v, map->v, tol_px);
    out->n_compared = s.n_compared;
    out->n_matched = s.n_matched;
    out->fraction = s.fraction;
  });
}

xm_status xm_disparity_map_depth_image(const xm_disparity_map* map,
                                       const xm_calib* calib, xm_depth_image** out) {
  return wrap([&] {
    check(map != nullptr && calib != nullptr && out != nullptr, "null argument");
    *out = new xm_depth_image{xmaps::depth_image_from_disparities(map->v, calib->v)};
  });
}

/* ----- simulator ----- */

xm_scan_profile xm_scan_profile_default(void) {
  xm_scan_profile p;
  std::memset(&p, 0, sizeof p);
  p.frame_rate_hz = 60.0;
  p.scan_fraction = 0.78;
  return p;
}

xm_status xm_simulate(const xm_scene* scene, const xm_calib* calib,
                      const xm_scan_profile* profile, int32_t frames, uint64_t seed,
                      xm_sim** out) {
  return wrap([&] {
    check(scene != nullptr && calib != nullptr && profile != nullptr && out != nullptr,
          "null argument");
    auto core_scene = scene_from_c(*scene);
    auto core_profile = profile_from_c(*profile, calib->v);
    *out = new xm_sim{xmaps::simulate(core_scene, calib->v, core_profile, frames, seed)};
  });
}

xm_status xm_sim_events(const xm_sim* sim, xm_events** out) {
  return wrap([&] {
    check(sim != nullptr && out != nullptr, "null argument");
    *out = new xm_events{sim->v.events};
  });
}

xm_status xm_sim_truth_count(const xm_sim* sim, size_t* out) {
  return wrap([&] {
    check(sim != nullptr && out != nullptr, "null argument");
    *out = sim->v.truth.records.size();
  });
}

xm_status xm_sim_truth_get(const xm_sim* sim, size_t index, xm_ground_truth_point* out) {
  return wrap([&] {
    check(sim != nullptr && out != nullptr, "null argument");
    xmaps::require(index < sim->v.truth.records.size(), xmaps::ErrorKind::out_of_bounds,
                   "record index out of range");
    const xmaps::GroundTruthRecord& r = sim->v.truth.records[index];
    *out = {r.emit_t_us, r.proj_x, r.proj_y, r.depth_m, r.disparity_px};
  });
}

xm_status xm_sim_counts(const xm_sim* sim, size_t* n_positive, size_t* n_negative,
                        size_t* n_duplicates) {
  return wrap([&] {
    check(sim != nullptr && n_positive != nullptr && n_negative != nullptr &&
              n_duplicates != nullptr,
          "null argument");
    *n_positive = sim->v.truth.n_positive;
    *n_negative = sim->v.truth.n_negative;
    *n_duplicates = sim->v.truth.n_duplicates;
  });
}

xm_status xm_sim_write_ground_truth(const xm_sim* sim, const char* path) {
  return wrap([&] {
    check(sim != nullptr && path != nullptr, "null argument");
    xmaps::write_ground_truth(path, sim->v.truth, sim->v.events);
  });
}

xm_status xm_sim_true_depth_image(const xm_sim* sim, xm_depth_image** out) {
  return wrap([&] {
    check(sim != nullptr && out != nullptr, "null argument");
    const xmaps::EventStream& events = sim->v.events;
    xmaps::DepthImage image(events.sensor_width(), events.sensor_height());
    for (size_t i = 0; i < events.size(); ++i) {
      const xmaps::Event& e = events.events()[i];
      float depth = float(sim->v.truth.records[i].depth_m);
      if (!image.defined(e.x, e.y) || depth < image.at(e.x, e.y))
        image.set(e.x, e.y, depth);
    }
    *out = new xm_depth_image{std::move(image)};
  });
}

xm_status xm_ideal_xmap_for(const xm_scan_profile* profile, const xm_calib* calib,
                            int32_t time_columns, int32_t out_height, xm_xmap** out) {
  return wrap([&] {
    check(profile != nullptr && calib != nullptr && out != nullptr, "null argument");
    auto core_profile = profile_from_c(*profile, calib->v);
    *out = new xm_xmap{
        xmaps::ideal_xmap_for(core_profile, calib->v, time_columns, out_height)};
  });
}

/* ----- metrics ----- */

xm_status xm_render_depth_image(const xm_depth_frame* frame, int32_t width,
                                int32_t height, xm_depth_image** out) {
  return wrap([&] {
    check(frame != nullptr && out != nullptr, "null argument");
    *out = new xm_depth_image{xmaps::render_depth_image(frame->v, width, height)};
  });
}

xm_status xm_depth_image_read(const char* path, xm_depth_image** out) {
  return wrap([&] {
    check(path != nullptr && out != nullptr, "null argument");
    *out = new xm_depth_image{xmaps::read_depth_image(path)};
  });
}

xm_status xm_depth_image_write(const xm_depth_image* image, const char* path) {
  return wrap([&] {
    check(image != nullptr && path != nullptr, "null argument");
    xmaps::write_depth_image(path, image->v);
  });
}

xm_status xm_depth_image_size(const xm_depth_image* image, int32_t* width,
                              int32_t* height) {
  return wrap([&] {
    check(image != nullptr && width != nullptr && height != nullptr, "null argument");
    *width = image->v.width();
    *height = image->v.height();
  });
}

xm_status xm_depth_image_get(const xm_depth_image* image, int32_t x, int32_t y,
                             float* depth_m, int32_t* defined) {
  return wrap([&] {
    check(image != nullptr && depth_m != nullptr && defined != nullptr, "null argument");
    xmaps::require(x >= 0 && x < image->v.width() && y >= 0 && y < image->v.height(),
                   xmaps::ErrorKind::out_of_bounds, "cell outside depth image");
    *depth_m = image->v.at(x, y);
    *defined = image->v.defined(x, y) ? 1 : 0;
  });
}

xm_status xm_rmse_cm(const xm_depth_image* estimate, const xm_depth_image* reference,
                     double* out) {
  return wrap([&] {
    check(estimate != nullptr && reference != nullptr && out != nullptr,
          "null argument");
    *out = xmaps::rmse_cm(estimate->v, reference->v);
  });
}

xm_status xm_fill_rate(const xm_depth_image* estimate, const xm_depth_image* reference,
                       double* out) {
  return wrap([&] {
    check(estimate != nullptr && reference != nullptr && out != nullptr,
          "null argument");
    *out = xmaps::fill_rate(estimate->v, reference->v);
  });
}

xm_status xm_plane_fit_rmse_cm(const double* points_xyz, size_t n, double* out) {
  return wrap([&] {
    check(points_xyz != nullptr && out != nullptr, "null argument");
    std::vector<xmaps::Vec3> points;
    points.reserve(n);
    for (size_t i = 0; i < n; ++i)
      points.push_back(
          {points_xyz[3 * i], points_xyz[3 * i + 1], points_xyz[3 * i + 2]});
    *out = xmaps::plane_fit_rmse_cm(points);
  });
}

xm_status xm_depth_frame_plane_fit_rmse_cm(const xm_depth_frame* frame,
                                           const xm_calib* calib, double* out) {
  return wrap([&] {
    check(frame != nullptr && calib != nullptr && out != nullptr, "null argument");
    auto points = xmaps::depth_frame_points(frame->v, calib->v);
    *out = xmaps::plane_fit_rmse_cm(points);
  });
}

xm_status xm_evaluate(const xm_depth_image* estimate, const xm_depth_image* reference,
                      const xm_depth_frame* frame, const xm_calib* calib,
                      xm_eval_report* out) {
  return wrap([&] {
    check(estimate != nullptr && reference != nullptr && out != nullptr,
          "null argument");
    xmaps::EvalReport r = xmaps::evaluate(estimate->v, reference->v,
                                          frame != nullptr ? &frame->v : nullptr,
                                          calib != nullptr ? &calib->v : nullptr);
    out->rmse_cm = r.rmse_cm;
    out->fill_rate = r.fill_rate;
    out->n_compared = r.n_compared;
    out->mean_scene_depth_m = r.mean_scene_depth_m;
    out->plane_fit_rmse_cm =
        r.plane_fit_rmse_cm.value_or(std::numeric_limits<double>::quiet_NaN());
    for (int i = 0; i < 4; ++i) out->discard_counts[i] = r.discard_counts[size_t(i)];
  });
}

/* ----- benchmark ----- */

xm_status xm_bench_depth_frame(const xm_events* events, const xm_frame_slice* frame,
                               const xm_xmap* xmap, const xm_rectmap* camera_rectify,
                               const xm_calib* calib, xm_dedup_mode dedup,
                               int32_t repetitions, xm_bench_stats* out) {
  return wrap([&] {
    check(events != nullptr && frame != nullptr && xmap != nullptr &&
              camera_rectify != nullptr && calib != nullptr && out != nullptr,
          "null argument");
    auto slice = slice_from_c(*frame);
    xmaps::BenchStats s = xmaps::bench_depth_frame(
        slice_events(events->v, slice), slice, xmap->v, camera_rectify->v, calib->v,
        dedup == XM_DEDUP_KEEP_ALL ? xmaps::DedupMode::keep_all
                                   : xmaps::DedupMode::keep_first,
        repetitions);
    out->mean_ms = s.mean_ms;
    out->stddev_ms = s.stddev_ms;
    out->n_events = s.n_events;
    out->n_retained = s.n_retained;
    out->repetitions = s.repetitions;
  });
}

} /* extern "C" */
