#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core/events.hpp"

namespace xmaps {

// Frame segmentation thresholds. A projected frame shows up as a dense run
// of events (consecutive gaps of 0-1 us while the laser scans) separated by
// the projector's reset silence; 40 us is roughly two scan lines.
struct TriggerConfig {
  uint64_t max_intra_frame_gap_us = 40;
  uint64_t min_frame_span_us = 8000;
  uint64_t batch_span_us = 16667;

  void validate() const;
};

// One detected projected frame: a half-open index range into the source
// stream plus the first/last timestamps of that range.
struct FrameSlice {
  uint64_t start_t_us = 0;
  uint64_t end_t_us = 0;
  size_t begin_index = 0;
  size_t end_index = 0;  // one past the last event

  uint64_t span_us() const { return end_t_us - start_t_us; }
  size_t count() const { return end_index - begin_index; }
};

// Splits a sorted stream into maximal runs whose consecutive gaps stay at or
// below max_intra_frame_gap_us; runs spanning less than min_frame_span_us are
// discarded (partial scans would corrupt time normalization downstream).
// Runs longer than one nominal frame are emitted as a single slice.
std::vector<FrameSlice> split_frames(const EventStream& stream, const TriggerConfig& cfg);

// Incremental splitter for batch-wise ingestion. Feed consecutive chunks of
// one logical stream; emitted slices carry global indices. A batch should
// span at least batch_span_us so that at least one frame gap is present, but
// correctness does not depend on it. Single-consumer stateful.
class FrameSplitter {
 public:
  explicit FrameSplitter(const TriggerConfig& cfg);

  // Consumes the next chunk; returns the slices completed by it.
  std::vector<FrameSlice> push(std::span<const Event> batch);

  // Flushes the trailing unfinished run (if it qualifies as a frame).
  std::vector<FrameSlice> finish();

 private:
  void close_run(std::vector<FrameSlice>& out);

  TriggerConfig cfg_;
  bool in_run_ = false;
  uint64_t run_start_t_ = 0;
  uint64_t last_t_ = 0;
  size_t run_begin_ = 0;
  size_t next_index_ = 0;
};

}  // namespace xmaps
