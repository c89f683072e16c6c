#pragma once

#include <string>

#include "core/events.hpp"
#include "core/geometry.hpp"
#include "core/metrics.hpp"
#include "core/simulator.hpp"
#include "core/timemap.hpp"
#include "core/xmap.hpp"

namespace xmaps {

// File formats.
//
// Events, binary ("XEV1"): magic, then little-endian u16 sensor_width,
// u16 sensor_height, u64 count, followed by fixed 16-byte records of
// u64 t_us, u16 x, u16 y, u8 polarity (1 = positive), u8 reserved.
//
// Events, CSV: header line "t_us,x,y,p", rows in ascending t. The sensor
// size is the tight bound of the coordinates unless given explicitly.
//
// Maps ("XMP1"): magic, u8 kind (0 = time map, 1 = X-map, 2 = depth image),
// u32 width, u32 height, then 32-bit IEEE-754 values row-major with quiet
// NaN encoding undefined cells.
//
// Calibration: line-oriented "key = value" text, '#' comments. Keys:
// cam_fx..cam_height and proj_* (fx, fy, cx, cy, width, height), r00..r22,
// t0..t2. Extrinsics map camera coordinates into projector coordinates.
//
// Every reader rejects truncated input; text files must end with a newline.

enum class EventFileFormat { binary, csv };

void write_events(const std::string& path, const EventStream& stream,
                  EventFileFormat format = EventFileFormat::binary);
// Sniffs binary magic vs. CSV header.
EventStream read_events(const std::string& path);

void write_time_map(const std::string& path, const TimeMap& map);
TimeMap read_time_map(const std::string& path);

void write_xmap(const std::string& path, const XMap& xmap);
XMap read_xmap(const std::string& path);

void write_depth_image(const std::string& path, const DepthImage& image);
DepthImage read_depth_image(const std::string& path);

void write_calibration(const std::string& path, const StereoCalibration& calib);
StereoCalibration read_calibration(const std::string& path);

// ASCII point list (x y z in meters plus per-point t in microseconds);
// vertex count equals the retained events. Throws for an empty frame.
void export_ply(const std::string& path, const DepthFrame& frame,
                const StereoCalibration& calib);

// CSV sidecar aligned with the event stream: one row per emitted event with
// its true projector coordinate, depth, disparity, and emission time.
void write_ground_truth(const std::string& path, const GroundTruth& truth,
                        const EventStream& events);

}  // namespace xmaps
