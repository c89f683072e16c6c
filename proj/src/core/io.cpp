#include "core/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "core/error.hpp"

namespace xmaps {

namespace {

constexpr char kEventMagic[4] = {'X', 'E', 'V', '1'};
constexpr char kMapMagic[4] = {'X', 'M', 'P', '1'};
constexpr char kCsvHeader[] = "t_us,x,y,p";

void put_u16(std::string& out, uint16_t v) {
  out.push_back(char(v & 0xff));
  out.push_back(char(v >> 8));
}

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& out, float v) {
  uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}

class ByteReader {
 public:
  ByteReader(const std::string& data, const std::string& path)
      : data_(data), path_(path) {}

  uint16_t u16() { return uint16_t(byte()) | uint16_t(byte()) << 8; }
  uint32_t u32() {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(byte()) << (8 * i);
    return v;
  }
  uint64_t u64() {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(byte()) << (8 * i);
    return v;
  }
  float f32() {
    uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
  void skip(size_t n) {
    require(pos_ + n <= data_.size(), ErrorKind::truncated, path_ + ": file truncated");
    pos_ += n;
  }
  size_t remaining() const { return data_.size() - pos_; }

  void expect_size(size_t expected) const {
    require(data_.size() >= expected, ErrorKind::truncated, path_ + ": file truncated");
    require(data_.size() <= expected, ErrorKind::bad_format,
            path_ + ": trailing bytes after payload");
  }

 private:
  uint8_t byte() {
    require(pos_ < data_.size(), ErrorKind::truncated, path_ + ": file truncated");
    return uint8_t(data_[pos_++]);
  }

  const std::string& data_;
  std::string path_;
  size_t pos_ = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  require(!in.bad(), ErrorKind::io, "read error on " + path);
  return std::move(buf).str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorKind::io, "cannot open " + path + " for writing");
  out.write(data.data(), std::streamsize(data.size()));
  out.flush();
  require(out.good(), ErrorKind::io, "write error on " + path);
}

// Splits text into lines, requiring a trailing newline so that end
// truncation is always detectable.
std::vector<std::string> text_lines(const std::string& data, const std::string& path) {
  require(!data.empty() && data.back() == '\n', ErrorKind::truncated,
          path + ": missing trailing newline (truncated?)");
  std::vector<std::string> lines;
  size_t start = 0;
  for (size_t i = 0; i < data.size(); ++i) {
    if (data[i] == '\n') {
      lines.push_back(data.substr(start, i - start));
      start = i + 1;
    }
  }
  return lines;
}

uint64_t parse_u64(const std::string& field, const std::string& context) {
  uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  require(ec == std::errc() && ptr == field.data() + field.size(), ErrorKind::bad_format,
          context + ": bad integer '" + field + "'");
  return v;
}

double parse_double(const std::string& field, const std::string& context) {
  try {
    size_t consumed = 0;
    double v = std::stod(field, &consumed);
    while (consumed < field.size() && std::isspace(uint8_t(field[consumed]))) ++consumed;
    require(consumed == field.size(), ErrorKind::bad_format,
            context + ": bad number '" + field + "'");
    return v;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(ErrorKind::bad_format, context + ": bad number '" + field + "'");
  }
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

EventStream read_events_csv(const std::string& data, const std::string& path) {
  auto lines = text_lines(data, path);
  require(!lines.empty() && lines[0] == kCsvHeader, ErrorKind::bad_format,
          path + ": missing CSV header '" + kCsvHeader + "'");
  std::vector<Event> events;
  uint16_t max_x = 0, max_y = 0;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty() || lines[i][0] == '#') continue;
    auto fields = split(lines[i], ',');
    require(fields.size() == 4, ErrorKind::bad_format,
            path + ": expected 4 fields per row");
    Event e;
    e.t_us = parse_u64(fields[0], path);
    uint64_t x = parse_u64(fields[1], path);
    uint64_t y = parse_u64(fields[2], path);
    uint64_t p = parse_u64(fields[3], path);
    require(x < 65536 && y < 65536 && p <= 1, ErrorKind::bad_format,
            path + ": field out of range");
    e.x = uint16_t(x);
    e.y = uint16_t(y);
    e.polarity = uint8_t(p);
    max_x = std::max(max_x, e.x);
    max_y = std::max(max_y, e.y);
    events.push_back(e);
  }
  uint16_t width = uint16_t(max_x + 1);
  uint16_t height = uint16_t(max_y + 1);
  return EventStream::from_events(width, height, std::move(events));
}

}  // namespace

void write_events(const std::string& path, const EventStream& stream,
                  EventFileFormat format) {
  if (format == EventFileFormat::csv) {
    std::string out(kCsvHeader);
    out.push_back('\n');
    for (const Event& e : stream.events()) {
      out += std::to_string(e.t_us);
      out.push_back(',');
      out += std::to_string(e.x);
      out.push_back(',');
      out += std::to_string(e.y);
      out.push_back(',');
      out += std::to_string(int(e.polarity));
      out.push_back('\n');
    }
    write_file(path, out);
    return;
  }
  std::string out(kEventMagic, 4);
  out.reserve(16 + stream.size() * 16);
  put_u16(out, stream.sensor_width());
  put_u16(out, stream.sensor_height());
  put_u64(out, stream.size());
  for (const Event& e : stream.events()) {
    put_u64(out, e.t_us);
    put_u16(out, e.x);
    put_u16(out, e.y);
    out.push_back(char(e.polarity));
    out.push_back('\0');  // reserved
  }
  write_file(path, out);
}

EventStream read_events(const std::string& path) {
  std::string data = read_file(path);
  if (data.size() < 4 || std::memcmp(data.data(), kEventMagic, 4) != 0) {
    if (data.rfind(kCsvHeader, 0) == 0) return read_events_csv(data, path);
    fail(ErrorKind::bad_magic, path + ": not an event file (bad magic)");
  }
  ByteReader r(data, path);
  r.skip(4);  // magic
  require(r.remaining() >= 12, ErrorKind::truncated, path + ": header truncated");
  uint16_t width = r.u16();
  uint16_t height = r.u16();
  uint64_t count = r.u64();
  r.expect_size(16 + count * 16);
  std::vector<Event> events;
  events.reserve(count);
  for (uint64_t i = 0; i < count; ++i) {
    Event e;
    e.t_us = r.u64();
    e.x = r.u16();
    e.y = r.u16();
    uint16_t tail = r.u16();
    e.polarity = uint8_t(tail & 0xff);
    require(e.polarity <= 1, ErrorKind::bad_format, path + ": bad polarity byte");
    events.push_back(e);
  }
  return EventStream::from_events(width, height, std::move(events));
}

namespace {

void write_map_payload(const std::string& path, uint8_t kind, int width, int height,
                       std::span<const float> values) {
  std::string out(kMapMagic, 4);
  out.reserve(13 + values.size() * 4);
  out.push_back(char(kind));
  put_u32(out, uint32_t(width));
  put_u32(out, uint32_t(height));
  for (float v : values) put_f32(out, v);
  write_file(path, out);
}

struct MapPayload {
  int width = 0, height = 0;
  std::vector<float> values;
};

// Layout: magic(4), kind u8, width u32, height u32, then f32 row-major.
MapPayload read_map_payload(const std::string& path, uint8_t expected_kind,
                            const char* kind_name) {
  std::string data = read_file(path);
  require(data.size() >= 4 && std::memcmp(data.data(), kMapMagic, 4) == 0,
          ErrorKind::bad_magic, path + ": not a map file (bad magic)");
  require(data.size() >= 13, ErrorKind::truncated, path + ": header truncated");
  const uint8_t* raw = reinterpret_cast<const uint8_t*>(data.data());
  uint8_t kind = raw[4];
  uint32_t w = 0, h = 0;
  std::memcpy(&w, raw + 5, 4);
  std::memcpy(&h, raw + 9, 4);
  require(kind == expected_kind, ErrorKind::bad_format,
          path + ": map kind mismatch (expected " + std::string(kind_name) + ")");
  require(w > 0 && h > 0 && w < (1u << 20) && h < (1u << 20), ErrorKind::bad_format,
          path + ": implausible dimensions");
  size_t expected = 13 + size_t(w) * size_t(h) * 4;
  require(data.size() >= expected, ErrorKind::truncated, path + ": file truncated");
  require(data.size() <= expected, ErrorKind::bad_format,
          path + ": trailing bytes after payload");
  MapPayload out;
  out.width = int(w);
  out.height = int(h);
  out.values.resize(size_t(w) * size_t(h));
  std::memcpy(out.values.data(), raw + 13, out.values.size() * 4);
  return out;
}

}  // namespace

void write_time_map(const std::string& path, const TimeMap& map) {
  write_map_payload(path, 0, map.width(), map.height(), map.values());
}

TimeMap read_time_map(const std::string& path) {
  MapPayload p = read_map_payload(path, 0, "time map");
  TimeMap map(p.width, p.height);
  for (size_t i = 0; i < p.values.size(); ++i) {
    float v = p.values[i];
    require(std::isnan(v) || (v >= 0.0f && v <= 1.0f), ErrorKind::bad_format,
            path + ": time map value outside [0, 1]");
    map.values()[i] = v;
  }
  return map;
}

void write_xmap(const std::string& path, const XMap& xmap) {
  write_map_payload(path, 1, xmap.time_columns(), xmap.height(), xmap.entries());
}

XMap read_xmap(const std::string& path) {
  MapPayload p = read_map_payload(path, 1, "X-map");
  XMap xmap(p.height, p.width);
  for (size_t i = 0; i < p.values.size(); ++i) {
    float v = p.values[i];
    require(std::isnan(v) || v >= 0.0f, ErrorKind::bad_format,
            path + ": negative X-map entry");
    xmap.entries()[i] = v;
  }
  return xmap;
}

void write_depth_image(const std::string& path, const DepthImage& image) {
  write_map_payload(path, 2, image.width(), image.height(), image.values());
}

DepthImage read_depth_image(const std::string& path) {
  MapPayload p = read_map_payload(path, 2, "depth image");
  DepthImage image(p.width, p.height);
  for (size_t i = 0; i < p.values.size(); ++i) {
    float v = p.values[i];
    require(std::isnan(v) || (v > 0.0f && std::isfinite(v)), ErrorKind::bad_format,
            path + ": non-positive depth value");
    image.values()[i] = v;
  }
  return image;
}

void write_calibration(const std::string& path, const StereoCalibration& calib) {
  std::ostringstream out;
  out << "# xmaps stereo calibration\n";
  out << "# extrinsics: p_projector = R * p_camera + t\n";
  auto intr = [&](const char* prefix, const PinholeIntrinsics& i) {
    out << prefix << "fx = " << format_double(i.fx) << '\n';
    out << prefix << "fy = " << format_double(i.fy) << '\n';
    out << prefix << "cx = " << format_double(i.cx) << '\n';
    out << prefix << "cy = " << format_double(i.cy) << '\n';
    out << prefix << "width = " << i.width << '\n';
    out << prefix << "height = " << i.height << '\n';
  };
  intr("cam_", calib.camera);
  intr("proj_", calib.projector);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      out << 'r' << r << c << " = " << format_double(calib.rotation(r, c)) << '\n';
  out << "t0 = " << format_double(calib.translation.x) << '\n';
  out << "t1 = " << format_double(calib.translation.y) << '\n';
  out << "t2 = " << format_double(calib.translation.z) << '\n';
  write_file(path, out.str());
}

StereoCalibration read_calibration(const std::string& path) {
  std::string data = read_file(path);
  auto lines = text_lines(data, path);
  std::map<std::string, double> kv;
  for (const std::string& line : lines) {
    std::string trimmed = line;
    while (!trimmed.empty() && std::isspace(uint8_t(trimmed.front()))) trimmed.erase(0, 1);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    size_t eq = trimmed.find('=');
    require(eq != std::string::npos, ErrorKind::bad_format,
            path + ": expected 'key = value', got '" + line + "'");
    std::string key = trimmed.substr(0, eq);
    std::string value = trimmed.substr(eq + 1);
    auto strip = [](std::string& s) {
      while (!s.empty() && std::isspace(uint8_t(s.front()))) s.erase(0, 1);
      while (!s.empty() && std::isspace(uint8_t(s.back()))) s.pop_back();
    };
    strip(key);
    strip(value);
    require(!kv.contains(key), ErrorKind::bad_format, path + ": duplicate key " + key);
    kv[key] = parse_double(value, path);
  }
  auto get = [&](const std::string& key) {
    auto it = kv.find(key);
    require(it != kv.end(), ErrorKind::bad_format, path + ": missing key " + key);
    return it->second;
  };
  auto intr = [&](const std::string& prefix) {
    PinholeIntrinsics i;
    i.fx = get(prefix + "fx");
    i.fy = get(prefix + "fy");
    i.cx = get(prefix + "cx");
    i.cy = get(prefix + "cy");
    i.width = int(get(prefix + "width"));
    i.height = int(get(prefix + "height"));
    return i;
  };
  StereoCalibration calib;
  calib.camera = intr("cam_");
  calib.projector = intr("proj_");
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      calib.rotation(r, c) = get(std::string("r") + char('0' + r) + char('0' + c));
  calib.translation = {get("t0"), get("t1"), get("t2")};
  calib.validate();
  return calib;
}

void export_ply(const std::string& path, const DepthFrame& frame,
                const StereoCalibration& calib) {
  require(frame.size() > 0, ErrorKind::empty_input, "depth frame holds no points");
  std::ostringstream out;
  out << "ply\nformat ascii 1.0\n";
  out << "element vertex " << frame.size() << '\n';
  out << "property float x\nproperty float y\nproperty float z\n";
  out << "property double t_us\n";
  out << "end_header\n";
  for (size_t i = 0; i < frame.size(); ++i) {
    Vec3 p = event_to_3d(frame.x_r[i], frame.y_r[i], frame.disparity_px[i], calib);
    out << float(p.x) << ' ' << float(p.y) << ' ' << float(p.z) << ' ' << frame.t_us[i]
        << '\n';
  }
  write_file(path, out.str());
}

void write_ground_truth(const std::string& path, const GroundTruth& truth,
                        const EventStream& events) {
  require(truth.records.size() == events.size(), ErrorKind::dimension_mismatch,
          "ground truth records must align with the event stream");
  std::ostringstream out;
  out << "# n_positive=" << truth.n_positive << '\n';
  out << "# n_negative=" << truth.n_negative << '\n';
  out << "# n_duplicates=" << truth.n_duplicates << '\n';
  out << "t_us,x,y,p,proj_x,proj_y,depth_m,disparity_px,emit_t_us\n";
  for (size_t i = 0; i < truth.records.size(); ++i) {
    const Event& e = events.events()[i];
    const GroundTruthRecord& r = truth.records[i];
    out << e.t_us << ',' << e.x << ',' << e.y << ',' << int(e.polarity) << ','
        << r.proj_x << ',' << r.proj_y << ',' << format_double(r.depth_m) << ','
        << format_double(r.disparity_px) << ',' << r.emit_t_us << '\n';
  }
  write_file(path, out.str());
}

}  // namespace xmaps
