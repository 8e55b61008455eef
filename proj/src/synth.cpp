#include "patchtrack/synth.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "patchtrack/errors.hpp"
#include "patchtrack/geometry.hpp"
#include "patchtrack/prng.hpp"

namespace patchtrack {

namespace {

constexpr double kTargetAspect = 0.4;  // w = aspect * h
constexpr double kBaseScore = 0.95;
constexpr double kOcclusionIoU = 0.3;
constexpr double kFpScoreLo = 0.1;
constexpr double kFpScoreHi = 0.5;
constexpr double kMinBoxSide = 1.0;  // noisy detections keep at least 1 px

struct TargetState {
  double cx = 0.0;
  double cy = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  double lane_lo = 0.0;  // vertical wander band
  double lane_hi = 0.0;
  int redraw_frame = 0;
  int occluded_run = 0;
};

double height_at(const ScenarioConfig& cfg, double cy) {
  return cfg.base_height * (1.0 + cfg.perspective_gain * cy / cfg.arena_height);
}

BBox box_at(const ScenarioConfig& cfg, double cx, double cy) {
  const double h = height_at(cfg, cy);
  const double w = kTargetAspect * h;
  return BBox{cx - 0.5 * w, cy - 0.5 * h, w, h};
}

// Reflect a coordinate into [lo, hi], flipping velocity when it bounces.
void reflect(double& pos, double& vel, double lo, double hi) {
  if (hi <= lo) {
    pos = 0.5 * (lo + hi);
    vel = 0.0;
    return;
  }
  if (pos < lo) {
    pos = lo + (lo - pos);
    vel = -vel;
  }
  if (pos > hi) {
    pos = hi - (pos - hi);
    vel = -vel;
  }
  pos = std::clamp(pos, lo, hi);
}

double draw_speed(Xoshiro256pp& rng) {
  const double mag = rng.uniform(4.0, 11.0);
  return rng.uniform() < 0.5 ? -mag : mag;
}

}  // namespace

void ScenarioConfig::validate() const {
  if (arena_width <= 0.0 || arena_height <= 0.0) {
    throw ConfigError("arena dimensions must be positive");
  }
  if (n_targets < 1) throw ConfigError("n_targets must be >= 1");
  if (n_frames < 1) throw ConfigError("n_frames must be >= 1");
  if (base_height <= 0.0) throw ConfigError("base_height must be positive");
  if (perspective_gain < 0.0) throw ConfigError("perspective_gain must be >= 0");
  if (noise_std < 0.0) throw ConfigError("noise_std must be >= 0");
  if (occlusion_decay < 0.0 || occlusion_decay > 1.0) {
    throw ConfigError("occlusion_decay must be in [0, 1]");
  }
  if (fp_rate < 0.0) throw ConfigError("fp_rate must be >= 0");
  if (miss_score < 0.0 || miss_score > 1.0) {
    throw ConfigError("miss_score must be in [0, 1]");
  }
  if (base_height * (1.0 + perspective_gain) > arena_height) {
    throw ConfigError("tallest target does not fit the arena");
  }
}

std::pair<SequenceData, SequenceData> generate(const ScenarioConfig& cfg) {
  cfg.validate();
  Xoshiro256pp rng(cfg.seed);

  const double W = cfg.arena_width;
  const double H = cfg.arena_height;
  const int n = cfg.n_targets;

  std::vector<TargetState> targets(n);
  for (int i = 0; i < n; ++i) {
    TargetState& t = targets[i];
    const double lane_center = H * (0.15 + 0.7 * (i + 0.5) / n);
    const double lane_half = 0.08 * H;
    t.lane_lo = lane_center - lane_half;
    t.lane_hi = lane_center + lane_half;
    t.cy = lane_center + rng.uniform(-0.5, 0.5) * lane_half;
    const double h0 = height_at(cfg, t.cy);
    t.cx = rng.uniform(0.6 * h0, W - 0.6 * h0);
    t.vx = draw_speed(rng);
    t.vy = rng.uniform(-1.0, 1.0);
    t.redraw_frame = 1 + static_cast<int>(rng.uniform(10.0, 22.0));
  }

  SequenceData gt;
  SequenceData dets;
  gt.name = "synth";
  dets.name = "synth";
  gt.frame_count = cfg.n_frames;
  dets.frame_count = cfg.n_frames;

  std::vector<BBox> boxes(n);
  for (int f = 1; f <= cfg.n_frames; ++f) {
    for (int i = 0; i < n; ++i) {
      TargetState& t = targets[i];
      if (f >= t.redraw_frame) {
        t.vx = draw_speed(rng);
        t.vy = rng.uniform(-1.0, 1.0);
        t.redraw_frame = f + static_cast<int>(rng.uniform(10.0, 22.0));
      }
      t.cx += t.vx;
      t.cy += t.vy;
      // Keep the lane first so the height (and so the width) is settled
      // before the horizontal bounce check.
      reflect(t.cy, t.vy, std::max(t.lane_lo, 0.5 * height_at(cfg, t.cy)),
              std::min(t.lane_hi, H - 0.5 * height_at(cfg, t.cy)));
      const double half_w = 0.5 * kTargetAspect * height_at(cfg, t.cy);
      reflect(t.cx, t.vx, half_w, W - half_w);
      boxes[i] = box_at(cfg, t.cx, t.cy);
    }

    for (int i = 0; i < n; ++i) {
      bool occluded = false;
      for (int j = 0; j < n && !occluded; ++j) {
        if (j == i || targets[j].cy <= targets[i].cy) continue;
        occluded = iou(boxes[i], boxes[j]) > kOcclusionIoU;
      }
      targets[i].occluded_run = occluded ? targets[i].occluded_run + 1 : 0;
    }

    auto& gt_rows = gt.frames[f];
    auto& det_rows = dets.frames[f];
    for (int i = 0; i < n; ++i) {
      gt_rows.push_back({i + 1, boxes[i], 1.0});

      const double score = std::clamp(
          kBaseScore - cfg.occlusion_decay * targets[i].occluded_run, 0.0, 1.0);
      // Noise is always drawn, even for dropped detections, so the random
      // stream does not depend on drop decisions.
      BBox noisy{boxes[i].x + rng.normal(0.0, cfg.noise_std),
                 boxes[i].y + rng.normal(0.0, cfg.noise_std),
                 std::max(boxes[i].w + rng.normal(0.0, cfg.noise_std), kMinBoxSide),
                 std::max(boxes[i].h + rng.normal(0.0, cfg.noise_std), kMinBoxSide)};
      if (score >= cfg.miss_score) {
        det_rows.push_back({-1, noisy, score});
      }
    }

    if (cfg.fp_rate > 0.0) {
      const int k = rng.poisson(cfg.fp_rate);
      for (int c = 0; c < k; ++c) {
        const double cy = rng.uniform(0.1 * H, 0.9 * H);
        const double h = height_at(cfg, cy);
        const double w = kTargetAspect * h;
        const double cx = rng.uniform(0.5 * w, W - 0.5 * w);
        const double y = std::clamp(cy - 0.5 * h, 0.0, H - h);
        det_rows.push_back(
            {-1, BBox{cx - 0.5 * w, y, w, h}, rng.uniform(kFpScoreLo, kFpScoreHi)});
      }
    }
  }
  return {std::move(gt), std::move(dets)};
}

std::pair<SequenceData, SequenceData> crossing_fixture() {
  // Two constant-height targets. The tall one walks right the whole sequence;
  // the short one walks left fast and stops at frame 28, a velocity change
  // that coasting-only prediction cannot follow. The short target's score dips
  // to 0.3 at the sequence center while the tall one passes it.
  constexpr int kFrames = 60;
  constexpr double kTallW = 60.0, kTallY = 0.0, kTallH = 100.0;
  constexpr double kShortW = 70.0, kShortY = 40.0, kShortH = 30.0;
  constexpr int kDipStart = 26;
  constexpr double kDip[10] = {0.82, 0.70, 0.58, 0.44, 0.30,
                               0.42, 0.54, 0.66, 0.78, 0.86};

  SequenceData gt;
  SequenceData dets;
  gt.name = "crossing";
  dets.name = "crossing";
  gt.frame_count = kFrames;
  dets.frame_count = kFrames;

  for (int f = 1; f <= kFrames; ++f) {
    const double tall_cx = 106.0 + 9.0 * f;
    const double short_cx = f <= 27 ? 711.0 - 11.0 * f : 414.0;

    const BBox tall{tall_cx - 0.5 * kTallW, kTallY, kTallW, kTallH};
    const BBox short_box{short_cx - 0.5 * kShortW, kShortY, kShortW, kShortH};

    double short_score = 0.9;
    if (f >= kDipStart && f < kDipStart + 10) short_score = kDip[f - kDipStart];

    gt.frames[f].push_back({1, tall, 1.0});
    gt.frames[f].push_back({2, short_box, 1.0});
    dets.frames[f].push_back({-1, tall, 0.9});
    dets.frames[f].push_back({-1, short_box, short_score});
  }
  return {std::move(gt), std::move(dets)};
}

}  // namespace patchtrack
