#pragma once

#include <vector>

#include "patchtrack/mot_io.hpp"
#include "patchtrack/tracker.hpp"

namespace patchtrack {

/// Runs a fresh tracker over frames 1..frame_count of a detection sequence,
/// stepping empty frames too so tracks age.
std::vector<FrameOutput> run_tracker(const SequenceData& dets,
                                     const TrackerConfig& cfg);

}  // namespace patchtrack
