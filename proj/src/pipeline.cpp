#include "patchtrack/pipeline.hpp"

namespace patchtrack {

std::vector<FrameOutput> run_tracker(const SequenceData& dets,
                                     const TrackerConfig& cfg) {
  Tracker tracker(cfg);
  std::vector<FrameOutput> outputs;
  outputs.reserve(static_cast<std::size_t>(dets.frame_count));
  for (int f = 1; f <= dets.frame_count; ++f) {
    outputs.push_back(tracker.step(f, dets.detections(f)));
  }
  return outputs;
}

}  // namespace patchtrack
