#include "core/events.hpp"

#include "core/error.hpp"

namespace xmaps {

EventStream::EventStream(uint16_t sensor_width, uint16_t sensor_height)
    : width_(sensor_width), height_(sensor_height) {
  require(sensor_width > 0 && sensor_height > 0, ErrorKind::invalid_argument,
          "sensor dimensions must be positive");
}

EventStream EventStream::from_events(uint16_t sensor_width, uint16_t sensor_height,
                                     std::vector<Event> events) {
  EventStream stream(sensor_width, sensor_height);
  uint64_t last_t = 0;
  bool first = true;
  for (const Event& e : events) {
    require(e.x < sensor_width && e.y < sensor_height, ErrorKind::out_of_bounds,
            "event coordinates outside sensor");
    require(first || e.t_us >= last_t, ErrorKind::unsorted,
            "event timestamps must be non-decreasing");
    last_t = e.t_us;
    first = false;
  }
  stream.events_ = std::move(events);
  return stream;
}

void EventStream::append(const Event& e) {
  require(e.x < width_ && e.y < height_, ErrorKind::out_of_bounds,
          "event coordinates outside sensor");
  require(events_.empty() || e.t_us >= events_.back().t_us, ErrorKind::unsorted,
          "event timestamps must be non-decreasing");
  events_.push_back(e);
}

EventStream filter_positive(const EventStream& stream) {
  std::vector<Event> kept;
  kept.reserve(stream.size());
  for (const Event& e : stream.events()) {
    if (e.polarity != 0) kept.push_back(e);
  }
  return EventStream::from_events(stream.sensor_width(), stream.sensor_height(),
                                  std::move(kept));
}

std::vector<Event> dedup_range(std::span<const Event> events, uint16_t sensor_width,
                               uint16_t sensor_height, DedupMode mode) {
  if (mode == DedupMode::keep_all) {
    return {events.begin(), events.end()};
  }
  std::vector<uint8_t> seen(size_t(sensor_width) * sensor_height, 0);
  std::vector<Event> kept;
  kept.reserve(events.size());
  for (const Event& e : events) {
    uint8_t& cell = seen[size_t(e.y) * sensor_width + e.x];
    if (!cell) {
      cell = 1;
      kept.push_back(e);  // events arrive time-sorted, so first seen = earliest
    }
  }
  return kept;
}

EventStream dedup_coordinates(const EventStream& frame_events, DedupMode mode) {
  return EventStream::from_events(
      frame_events.sensor_width(), frame_events.sensor_height(),
      dedup_range(frame_events.span(), frame_events.sensor_width(),
                  frame_events.sensor_height(), mode));
}

}  // namespace xmaps
