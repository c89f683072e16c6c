#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace xmaps {

// One asynchronous brightness-change detection. Timestamps are integer
// microseconds; all time arithmetic stays integral until normalization.
struct Event {
  uint64_t t_us = 0;
  uint16_t x = 0;
  uint16_t y = 0;
  uint8_t polarity = 1;  // 1 = positive, 0 = negative
};

// Immutable-after-construction container for a time-sorted event sequence.
// Construction validates coordinate bounds and timestamp ordering; filters
// below are pure, so a stream is safe for concurrent reads.
class EventStream {
 public:
  EventStream(uint16_t sensor_width, uint16_t sensor_height);

  // Takes ownership of `events`; throws on out-of-bounds coordinates or a
  // decreasing timestamp.
  static EventStream from_events(uint16_t sensor_width, uint16_t sensor_height,
                                 std::vector<Event> events);

  uint16_t sensor_width() const { return width_; }
  uint16_t sensor_height() const { return height_; }
  const std::vector<Event>& events() const { return events_; }
  std::span<const Event> span() const { return events_; }
  size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }

  // Appends one event, enforcing the stream invariants. Used by builders
  // (simulator, readers); not part of the processing surface.
  void append(const Event& e);

 private:
  uint16_t width_;
  uint16_t height_;
  std::vector<Event> events_;
};

enum class DedupMode {
  keep_first,  // at most one event per (x, y), the earliest
  keep_all,    // identity
};

// Keeps exactly the positive-polarity events, order preserved.
EventStream filter_positive(const EventStream& stream);

// Coordinate filter for events of one projected frame. keep_first retains
// the earliest event per pixel (the laser's arrival); later duplicates are
// readout artifacts.
EventStream dedup_coordinates(const EventStream& frame_events, DedupMode mode);

// Range form used by the per-frame depth pipeline.
std::vector<Event> dedup_range(std::span<const Event> events, uint16_t sensor_width,
                               uint16_t sensor_height, DedupMode mode);

}  // namespace xmaps
