#pragma once

#include <cstdint>
#include <utility>

#include "patchtrack/mot_io.hpp"

namespace patchtrack {

/// Deterministic occlusion-scenario generator. Identical configs with
/// identical seeds produce identical output bit-for-bit.
struct ScenarioConfig {
  double arena_width = 1200.0;
  double arena_height = 700.0;
  int n_targets = 5;
  int n_frames = 100;
  double base_height = 80.0;
  // Target height = base_height * (1 + perspective_gain * cy / arena_height).
  double perspective_gain = 0.5;
  double noise_std = 1.5;       // Gaussian std on each box coordinate
  double occlusion_decay = 0.1; // score units per consecutive occluded frame
  double fp_rate = 0.2;         // expected false positives per frame
  double miss_score = 0.25;     // detections below this are dropped
  std::uint64_t seed = 1;

  /// Throws ConfigError on non-positive counts or out-of-range rates.
  void validate() const;
};

/// Ground truth plus noisy detections for the configured scenario.
///
/// Targets keep a stable depth lane (banded cy, mild vertical wander) and move
/// horizontally with piecewise-constant velocity and wall reflection. A
/// target's detection score is 0.95 minus occlusion_decay per consecutive
/// frame in which a target with larger cy overlaps it with IoU > 0.3;
/// detections under miss_score are dropped and Poisson(fp_rate) spurious
/// boxes with scores in [0.1, 0.5) are added per frame.
std::pair<SequenceData, SequenceData> generate(const ScenarioConfig& cfg);

/// The fixed two-target crossing scenario: a tall target (y extent [0,100])
/// passes a short one ([40,70]) whose detection score dips 0.9 -> 0.3 -> 0.9
/// over ten frames while it stops mid-path. Returns (gt, dets).
std::pair<SequenceData, SequenceData> crossing_fixture();

}  // namespace patchtrack
