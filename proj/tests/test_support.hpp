#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "core/events.hpp"
#include "core/geometry.hpp"
#include "core/simulator.hpp"
#include "core/trigger.hpp"

namespace xmaps::test {

// Stereo rig whose rectification is the identity on both views: identical
// focal lengths and a shared principal point, pure horizontal baseline.
// Projector pixel (x, y) rectifies to (x - cx_p + cx_c, y); with
// cx_p = cx_c - shift the footprint lands shift pixels to the right.
inline StereoCalibration aligned_rig(int cam_w = 640, int cam_h = 480, double f = 500.0,
                                     int proj_w = 640, int proj_h = 480,
                                     double baseline_m = 0.1, double proj_cx_shift = 50.0,
                                     double proj_cy_shift = 0.0) {
  StereoCalibration calib;
  calib.camera = {f, f, cam_w / 2.0, cam_h / 2.0, cam_w, cam_h};
  calib.projector = {f, f, cam_w / 2.0 - proj_cx_shift, cam_h / 2.0 - proj_cy_shift,
                     proj_w, proj_h};
  calib.rotation = Mat3::identity();
  calib.translation = {baseline_m, 0, 0};
  calib.validate();
  return calib;
}

// Scan profile whose emission times are exact integers: the active span
// equals proj_w * proj_h microseconds, so t = x*h + y for the linear model.
inline ScanProfile integer_time_profile(int proj_w, int proj_h) {
  ScanProfile p;
  p.scan_fraction = 0.75;
  double span_us = double(proj_w) * double(proj_h);
  double rate = 0.75e6 / span_us;
  p.scan = ScanModel::from_rate(proj_w, rate);
  return p;
}

inline FrameSlice whole_stream_slice(const EventStream& s) {
  FrameSlice slice;
  slice.begin_index = 0;
  slice.end_index = s.size();
  if (!s.empty()) {
    slice.start_t_us = s.events().front().t_us;
    slice.end_t_us = s.events().back().t_us;
  }
  return slice;
}

inline EventStream make_stream(uint16_t w, uint16_t h,
                               std::initializer_list<Event> events) {
  return EventStream::from_events(w, h, std::vector<Event>(events));
}

}  // namespace xmaps::test
