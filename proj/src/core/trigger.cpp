#include "core/trigger.hpp"

#include "core/error.hpp"

namespace xmaps {

void TriggerConfig::validate() const {
  require(max_intra_frame_gap_us < min_frame_span_us, ErrorKind::invalid_argument,
          "max_intra_frame_gap_us must be below min_frame_span_us");
  require(min_frame_span_us < batch_span_us, ErrorKind::invalid_argument,
          "min_frame_span_us must be below batch_span_us");
}

FrameSplitter::FrameSplitter(const TriggerConfig& cfg) : cfg_(cfg) {
  cfg.validate();
}

void FrameSplitter::close_run(std::vector<FrameSlice>& out) {
  if (in_run_ && last_t_ - run_start_t_ >= cfg_.min_frame_span_us) {
    out.push_back(FrameSlice{run_start_t_, last_t_, run_begin_, next_index_});
  }
  in_run_ = false;
}

std::vector<FrameSlice> FrameSplitter::push(std::span<const Event> batch) {
  std::vector<FrameSlice> out;
  for (const Event& e : batch) {
    if (in_run_) {
      require(e.t_us >= last_t_, ErrorKind::unsorted, "events must be time-sorted");
      if (e.t_us - last_t_ > cfg_.max_intra_frame_gap_us) {
        close_run(out);
      }
    }
    if (!in_run_) {
      in_run_ = true;
      run_start_t_ = e.t_us;
      run_begin_ = next_index_;
    }
    last_t_ = e.t_us;
    ++next_index_;
  }
  return out;
}

std::vector<FrameSlice> FrameSplitter::finish() {
  std::vector<FrameSlice> out;
  close_run(out);
  return out;
}

std::vector<FrameSlice> split_frames(const EventStream& stream, const TriggerConfig& cfg) {
  FrameSplitter splitter(cfg);
  std::vector<FrameSlice> slices = splitter.push(stream.span());
  for (FrameSlice& s : splitter.finish()) slices.push_back(s);
  return slices;
}

}  // namespace xmaps
