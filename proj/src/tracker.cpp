#include "patchtrack/tracker.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "patchtrack/errors.hpp"

namespace patchtrack {

void TrackerConfig::validate() const {
  if (!(0.0 <= tau_low && tau_low < tau_high && tau_high <= 1.0)) {
    throw ConfigError("require 0 <= tau_low < tau_high <= 1");
  }
  if (!(match_gate > 0.0)) throw ConfigError("match_gate must be positive");
  if (pseudo_ttl < 0) throw ConfigError("pseudo_ttl must be >= 0");
  if (min_hits < 1) throw ConfigError("min_hits must be >= 1");
  if (max_age < 1) throw ConfigError("max_age must be >= 1");
  if (!(tau_trust >= 0.0 && tau_trust <= 1.0)) {
    throw ConfigError("tau_trust must be in [0, 1]");
  }
  if (!(noise.position_weight > 0.0) || !(noise.velocity_weight > 0.0)) {
    throw ConfigError("noise weights must be positive");
  }
}

std::pair<std::vector<Detection>, std::vector<Detection>> split_by_score(
    std::span<const Detection> dets, const TrackerConfig& cfg) {
  std::vector<Detection> high, low;
  for (const auto& d : dets) {
    if (d.score >= cfg.tau_high) {
      high.push_back(d);
    } else if (d.score >= cfg.tau_low) {
      low.push_back(d);
    }
  }
  return {std::move(high), std::move(low)};
}

Assignment first_association(std::span<const Track> tracks,
                             std::span<const Detection> high_dets,
                             const TrackerConfig& cfg) {
  std::vector<BBox> track_boxes;
  track_boxes.reserve(tracks.size());
  for (const auto& t : tracks) track_boxes.push_back(state_to_bbox(t.state));
  std::vector<BBox> det_boxes;
  det_boxes.reserve(high_dets.size());
  for (const auto& d : high_dets) det_boxes.push_back(d.box);
  const CostMatrix cost = build_cost_matrix(track_boxes, det_boxes, cfg.cost_kind);
  return hungarian_solve(cost, cfg.match_gate);
}

std::vector<std::pair<std::size_t, std::size_t>> patch_association(
    std::span<const Track> unmatched_tracks, std::span<const Detection> low_dets,
    const TrackerConfig& cfg) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < unmatched_tracks.size(); ++i) {
    if (unmatched_tracks[i].trusted(cfg.tau_trust)) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Track& ta = unmatched_tracks[a];
    const Track& tb = unmatched_tracks[b];
    if (ta.confidence != tb.confidence) return ta.confidence > tb.confidence;
    return ta.id < tb.id;
  });

  std::vector<std::size_t> pool(low_dets.size());
  std::iota(pool.begin(), pool.end(), std::size_t{0});

  std::vector<std::pair<std::size_t, std::size_t>> claimed;
  for (std::size_t ti : order) {
    if (pool.empty()) break;
    std::vector<BBox> boxes;
    boxes.reserve(pool.size());
    for (std::size_t di : pool) boxes.push_back(low_dets[di].box);
    const auto best = greedy_best_iou(unmatched_tracks[ti].last_observation, boxes,
                                      cfg.patch_iou_kind, cfg.patch_min);
    if (!best) continue;
    claimed.emplace_back(ti, pool[*best]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(*best));
  }
  return claimed;
}

Track retain_pseudo_observation(const Track& track, const TrackerConfig& cfg) {
  Track out = track;
  if (track.pseudo_count < cfg.pseudo_ttl) {
    const BBox pseudo = state_to_bbox(track.state);
    out.state = kf_update(track.state, pseudo, cfg.noise);
    out.last_observation = pseudo;
    out.pseudo_count = track.pseudo_count + 1;
  } else {
    out.misses = track.misses + 1;
    out.hits = 0;
  }
  return out;
}

Tracker::Tracker(TrackerConfig cfg) : cfg_(cfg) { cfg_.validate(); }

FrameOutput Tracker::step(int frame, std::span<const Detection> dets) {
  if (frame <= last_frame_) {
    throw NonMonotonicFrameError("frame " + std::to_string(frame) +
                                 " does not increase past " +
                                 std::to_string(last_frame_));
  }
  for (const auto& d : dets) {
    if (d.frame != frame) {
      throw std::invalid_argument("detection frame mismatch within step");
    }
  }
  last_frame_ = frame;

  for (auto& t : tracks_) t.state = kf_predict(t.state, cfg_.noise);

  auto [high, low] = split_by_score(dets, cfg_);

  const Assignment stage1 = first_association(tracks_, high, cfg_);

  std::vector<int> matched_det(tracks_.size(), -1);   // index into high
  for (const auto& m : stage1.matches) {
    matched_det[m.row] = static_cast<int>(m.col);
  }

  // Stage 2 runs on the stage-1 leftovers against the low pool.
  std::vector<std::size_t> leftover = stage1.unmatched_rows;
  std::vector<Track> leftover_tracks;
  leftover_tracks.reserve(leftover.size());
  for (std::size_t i : leftover) leftover_tracks.push_back(tracks_[i]);
  std::vector<int> patched_det(tracks_.size(), -1);   // index into low
  for (const auto& [li, di] : patch_association(leftover_tracks, low, cfg_)) {
    patched_det[leftover[li]] = static_cast<int>(di);
  }

  std::vector<char> active(tracks_.size(), 0);
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    Track& t = tracks_[i];
    const Detection* det = nullptr;
    if (matched_det[i] >= 0) {
      det = &high[static_cast<std::size_t>(matched_det[i])];
    } else if (patched_det[i] >= 0) {
      det = &low[static_cast<std::size_t>(patched_det[i])];
    }
    if (det != nullptr) {
      t.state = kf_update(t.state, det->box, cfg_.noise);
      t.last_observation = det->box;
      t.confidence = det->score;
      t.hits += 1;
      t.misses = 0;
      t.pseudo_count = 0;
      active[i] = 1;
    } else if (t.trusted(cfg_.tau_trust)) {
      const int before = t.pseudo_count;
      t = retain_pseudo_observation(t, cfg_);
      active[i] = t.pseudo_count == before + 1;
    } else {
      t.misses += 1;
      t.hits = 0;
    }
  }

  for (auto& t : tracks_) {
    if (t.status == TrackStatus::Tentative && t.hits >= cfg_.min_hits) {
      t.status = TrackStatus::Confirmed;
    }
    if (t.misses > cfg_.max_age) t.status = TrackStatus::Removed;
  }

  for (std::size_t j : stage1.unmatched_cols) {
    const Detection& d = high[j];
    Track t;
    t.id = next_id_++;
    t.state = kf_init(d.box, cfg_.noise);
    t.last_observation = d.box;
    t.confidence = d.score;
    t.hits = 1;
    t.status = t.hits >= cfg_.min_hits ? TrackStatus::Confirmed
                                       : TrackStatus::Tentative;
    if (t.status == TrackStatus::Confirmed) {
      tracks_.push_back(t);
      active.push_back(1);
    } else {
      tracks_.push_back(t);
      active.push_back(0);
    }
  }

  FrameOutput out;
  out.frame = frame;
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    const Track& t = tracks_[i];
    if (t.status == TrackStatus::Confirmed && active[i]) {
      out.entries.push_back({t.id, state_to_bbox(t.state), t.confidence});
    }
  }
  std::sort(out.entries.begin(), out.entries.end(),
            [](const FrameEntry& a, const FrameEntry& b) { return a.id < b.id; });

  std::vector<Track> survivors;
  survivors.reserve(tracks_.size());
  for (const auto& t : tracks_) {
    if (t.status != TrackStatus::Removed) survivors.push_back(t);
  }
  tracks_ = std::move(survivors);

  return out;
}

}  // namespace patchtrack
