#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "patchtrack/assignment.hpp"
#include "patchtrack/geometry.hpp"
#include "patchtrack/motion.hpp"

namespace patchtrack {

/// A scored box at a frame index, the tracker's input unit.
struct Detection {
  int frame = 0;
  BBox box;
  double score = 0.0;
};

enum class TrackStatus { Tentative, Confirmed, Removed };

struct Track {
  int id = 0;
  KalmanState state;
  BBox last_observation;   // most recent observation fed to the filter
  int pseudo_count = 0;    // consecutive frames survived on pseudo-observations
  double confidence = 0.0; // score of the most recent matched detection
  int hits = 0;            // consecutive-match count
  int misses = 0;          // consecutive-unmatched count
  TrackStatus status = TrackStatus::Tentative;

  bool trusted(double tau_trust) const { return confidence >= tau_trust; }
};

struct TrackerConfig {
  double tau_high = 0.6;    // high-score split, boundary inclusive on high
  double tau_low = 0.1;     // low-score floor; below is discarded
  double match_gate = 0.8;  // stage-1 cost gate
  CostKind cost_kind = CostKind::HeightIoU;
  IoUKind patch_iou_kind = IoUKind::CIoU;
  double patch_min = 0.3;  // minimum patch score on the kind's native scale
  double tau_trust = 0.5;  // track trust threshold
  int pseudo_ttl = 3;
  int min_hits = 3;
  int max_age = 30;
  MotionNoise noise;

  /// Throws ConfigError on inconsistent thresholds.
  void validate() const;
};

struct FrameEntry {
  int id = 0;
  BBox box;
  double confidence = 0.0;
};

/// Confirmed tracks active (observed or coasting) this frame, ascending id.
struct FrameOutput {
  int frame = 0;
  std::vector<FrameEntry> entries;
};

/// high = score >= tau_high, low = tau_low <= score < tau_high, rest discarded.
/// Input order is preserved within each list.
std::pair<std::vector<Detection>, std::vector<Detection>> split_by_score(
    std::span<const Detection> dets, const TrackerConfig& cfg);

/// Stage 1: Hungarian over the location-wise cost matrix between the tracks'
/// predicted boxes and the high-score detections. Tracks must already be
/// advanced by kf_predict this frame.
Assignment first_association(std::span<const Track> tracks,
                             std::span<const Detection> high_dets,
                             const TrackerConfig& cfg);

/// Stage 2: unmatched trusted tracks claim remaining low-score boxes by
/// highest IoU against their last observation, in descending confidence order
/// (ties by ascending id). A claimed box leaves the pool. Untrusted tracks
/// claim nothing. Returns (track index, det index) pairs.
std::vector<std::pair<std::size_t, std::size_t>> patch_association(
    std::span<const Track> unmatched_tracks, std::span<const Detection> low_dets,
    const TrackerConfig& cfg);

/// Coast an unmatched trusted track: while pseudo_count < pseudo_ttl the
/// Kalman prediction is fed back as a short-term observation and the track
/// stays reportable; once the ttl is spent the track just ages (misses grows,
/// hits resets).
Track retain_pseudo_observation(const Track& track, const TrackerConfig& cfg);

class Tracker {
 public:
  explicit Tracker(TrackerConfig cfg);

  /// Run one frame of the pipeline. Frames must strictly increase; throws
  /// NonMonotonicFrameError otherwise. All detections must carry this frame's
  /// index.
  FrameOutput step(int frame, std::span<const Detection> dets);

  const std::vector<Track>& tracks() const { return tracks_; }
  const TrackerConfig& config() const { return cfg_; }

 private:
  TrackerConfig cfg_;
  std::vector<Track> tracks_;  // live (Tentative/Confirmed) tracks
  int next_id_ = 1;
  int last_frame_ = 0;
};

}  // namespace patchtrack
