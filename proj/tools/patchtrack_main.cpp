#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "patchtrack/errors.hpp"
#include "patchtrack/metrics.hpp"
#include "patchtrack/mot_io.hpp"
#include "patchtrack/pipeline.hpp"
#include "patchtrack/synth.hpp"
#include "patchtrack/tracker.hpp"
#include "patchtrack/version.hpp"

namespace {

using nlohmann::ordered_json;
using namespace patchtrack;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitParse = 2;
constexpr int kExitConfig = 3;
constexpr int kExitMismatch = 4;

std::string cost_name(CostKind k) {
  return k == CostKind::AreaIoU ? "area" : "height";
}

CostKind cost_from_name(const std::string& s) {
  if (s == "area") return CostKind::AreaIoU;
  if (s == "height") return CostKind::HeightIoU;
  throw ConfigError("unknown cost kind '" + s + "' (expected area|height)");
}

std::string iou_kind_name(IoUKind k) {
  switch (k) {
    case IoUKind::IoU:
      return "iou";
    case IoUKind::GIoU:
      return "giou";
    case IoUKind::DIoU:
      return "diou";
    case IoUKind::CIoU:
      return "ciou";
  }
  return "iou";
}

IoUKind iou_kind_from_name(const std::string& s) {
  if (s == "iou") return IoUKind::IoU;
  if (s == "giou") return IoUKind::GIoU;
  if (s == "diou") return IoUKind::DIoU;
  if (s == "ciou") return IoUKind::CIoU;
  throw ConfigError("unknown patch IoU kind '" + s +
                    "' (expected iou|giou|diou|ciou)");
}

ordered_json tracker_config_json(const TrackerConfig& c) {
  return ordered_json{{"tau_high", c.tau_high},
                      {"tau_low", c.tau_low},
                      {"match_gate", c.match_gate},
                      {"cost", cost_name(c.cost_kind)},
                      {"patch_iou", iou_kind_name(c.patch_iou_kind)},
                      {"patch_min", c.patch_min},
                      {"tau_trust", c.tau_trust},
                      {"pseudo_ttl", c.pseudo_ttl},
                      {"min_hits", c.min_hits},
                      {"max_age", c.max_age},
                      {"position_weight", c.noise.position_weight},
                      {"velocity_weight", c.noise.velocity_weight}};
}

void tracker_config_from_json(const nlohmann::json& j, TrackerConfig& c) {
  if (j.contains("tau_high")) c.tau_high = j["tau_high"].get<double>();
  if (j.contains("tau_low")) c.tau_low = j["tau_low"].get<double>();
  if (j.contains("match_gate")) c.match_gate = j["match_gate"].get<double>();
  if (j.contains("cost")) c.cost_kind = cost_from_name(j["cost"].get<std::string>());
  if (j.contains("patch_iou")) {
    c.patch_iou_kind = iou_kind_from_name(j["patch_iou"].get<std::string>());
  }
  if (j.contains("patch_min")) c.patch_min = j["patch_min"].get<double>();
  if (j.contains("tau_trust")) c.tau_trust = j["tau_trust"].get<double>();
  if (j.contains("pseudo_ttl")) c.pseudo_ttl = j["pseudo_ttl"].get<int>();
  if (j.contains("min_hits")) c.min_hits = j["min_hits"].get<int>();
  if (j.contains("max_age")) c.max_age = j["max_age"].get<int>();
  if (j.contains("position_weight")) {
    c.noise.position_weight = j["position_weight"].get<double>();
  }
  if (j.contains("velocity_weight")) {
    c.noise.velocity_weight = j["velocity_weight"].get<double>();
  }
}

ordered_json scenario_config_json(const ScenarioConfig& c) {
  return ordered_json{{"arena_width", c.arena_width},
                      {"arena_height", c.arena_height},
                      {"n_targets", c.n_targets},
                      {"n_frames", c.n_frames},
                      {"base_height", c.base_height},
                      {"perspective_gain", c.perspective_gain},
                      {"noise_std", c.noise_std},
                      {"occlusion_decay", c.occlusion_decay},
                      {"fp_rate", c.fp_rate},
                      {"miss_score", c.miss_score},
                      {"seed", c.seed}};
}

void scenario_config_from_json(const nlohmann::json& j, ScenarioConfig& c) {
  if (j.contains("arena_width")) c.arena_width = j["arena_width"].get<double>();
  if (j.contains("arena_height")) c.arena_height = j["arena_height"].get<double>();
  if (j.contains("n_targets")) c.n_targets = j["n_targets"].get<int>();
  if (j.contains("n_frames")) c.n_frames = j["n_frames"].get<int>();
  if (j.contains("base_height")) c.base_height = j["base_height"].get<double>();
  if (j.contains("perspective_gain")) {
    c.perspective_gain = j["perspective_gain"].get<double>();
  }
  if (j.contains("noise_std")) c.noise_std = j["noise_std"].get<double>();
  if (j.contains("occlusion_decay")) {
    c.occlusion_decay = j["occlusion_decay"].get<double>();
  }
  if (j.contains("fp_rate")) c.fp_rate = j["fp_rate"].get<double>();
  if (j.contains("miss_score")) c.miss_score = j["miss_score"].get<double>();
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad config JSON in '" + path + "': " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw TrackError("cannot write '" + path + "'");
  out << text;
}

void write_manifest(const std::string& path, const std::string& command,
                    const ordered_json& config, const ordered_json& inputs,
                    const ordered_json& outputs,
                    std::optional<std::uint64_t> seed) {
  ordered_json m;
  m["command"] = command;
  m["tool_version"] = kVersion;
  m["config"] = config;
  m["inputs"] = inputs;
  m["outputs"] = outputs;
  if (seed) {
    m["seed"] = *seed;
  } else {
    m["seed"] = nullptr;
  }
  write_text(path, m.dump(2) + "\n");
}

// Tracker flags shared by `track` and `sweep`. A JSON config file may supply
// values; explicit flags win.
struct TrackerFlags {
  std::string config_path;
  std::optional<double> tau_high, tau_low, match_gate, patch_min, tau_trust;
  std::optional<double> position_weight, velocity_weight;
  std::optional<int> pseudo_ttl, min_hits, max_age;
  std::optional<std::string> cost, patch_iou;

  void add_to(CLI::App& app) {
    app.add_option("--config", config_path, "Tracker config JSON file");
    auto opt = [&](const char* name, auto& slot, const char* help) {
      app.add_option_function<std::decay_t<decltype(*slot)>>(
          name,
          [&slot](const auto& v) { slot = v; },
          help);
    };
    opt("--tau-high", tau_high, "High-score split threshold");
    opt("--tau-low", tau_low, "Low-score floor");
    opt("--match-gate", match_gate, "Stage-1 cost gate");
    opt("--patch-min", patch_min, "Minimum patch score (>1 disables patching)");
    opt("--tau-trust", tau_trust, "Track trust threshold");
    opt("--pseudo-ttl", pseudo_ttl, "Pseudo-observation budget");
    opt("--min-hits", min_hits, "Hits needed to confirm a track");
    opt("--max-age", max_age, "Misses allowed before removal");
    opt("--cost", cost, "Stage-1 cost matrix: area|height");
    opt("--patch-iou", patch_iou, "Patching IoU kind: iou|giou|diou|ciou");
    opt("--position-weight", position_weight, "KF position noise weight");
    opt("--velocity-weight", velocity_weight, "KF velocity noise weight");
  }

  TrackerConfig resolve() const {
    TrackerConfig c;
    if (!config_path.empty()) tracker_config_from_json(load_json(config_path), c);
    if (tau_high) c.tau_high = *tau_high;
    if (tau_low) c.tau_low = *tau_low;
    if (match_gate) c.match_gate = *match_gate;
    if (patch_min) c.patch_min = *patch_min;
    if (tau_trust) c.tau_trust = *tau_trust;
    if (pseudo_ttl) c.pseudo_ttl = *pseudo_ttl;
    if (min_hits) c.min_hits = *min_hits;
    if (max_age) c.max_age = *max_age;
    if (cost) c.cost_kind = cost_from_name(*cost);
    if (patch_iou) c.patch_iou_kind = iou_kind_from_name(*patch_iou);
    if (position_weight) c.noise.position_weight = *position_weight;
    if (velocity_weight) c.noise.velocity_weight = *velocity_weight;
    c.validate();
    return c;
  }
};

int cmd_track(const std::string& det_path, const std::string& out_path,
              const TrackerFlags& flags) {
  const TrackerConfig cfg = flags.resolve();
  const SequenceData dets = load_mot_file(det_path, ParseMode::Det);
  const auto outputs = run_tracker(dets, cfg);
  write_text(out_path, results_to_string(outputs));
  write_manifest(out_path + ".manifest.json", "track", tracker_config_json(cfg),
                 {{"det", det_path}}, {{"result", out_path}}, std::nullopt);
  return kExitOk;
}

std::string format_summary(const MetricsReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "HOTA %.2f | DetA %.2f | AssA %.2f | MOTA %.2f | IDF1 %.2f\n"
                "TP %lld FP %lld FN %lld IDSW %lld GT %lld\n",
                100.0 * r.hota, 100.0 * r.deta, 100.0 * r.assa, 100.0 * r.mota,
                100.0 * r.idf1, r.counts.tp, r.counts.fp, r.counts.fn,
                r.counts.idsw, r.counts.gt_total);
  return buf;
}

MetricsReport evaluate_files(const std::string& gt_path,
                             const std::string& res_path, std::string* name_out) {
  const SequenceData gt = load_mot_file(gt_path, ParseMode::GtOrResult);
  const SequenceData res = load_mot_file(res_path, ParseMode::GtOrResult);
  if (res.frame_count > gt.frame_count) {
    throw FrameRangeError("result frames extend past ground truth (" +
                          std::to_string(res.frame_count) + " > " +
                          std::to_string(gt.frame_count) + ")");
  }
  if (name_out != nullptr) *name_out = gt.name;
  return evaluate_sequence(gt, res);
}

int cmd_eval(const std::string& gt_path, const std::string& res_path,
             std::string out_path) {
  std::string name;
  const MetricsReport report = evaluate_files(gt_path, res_path, &name);
  const std::string doc = metrics_json({{name, report}});
  if (out_path.empty()) out_path = res_path + ".metrics.json";
  write_text(out_path, doc + "\n");
  std::cout << doc << "\n" << format_summary(report);
  write_manifest(out_path + ".manifest.json", "eval",
                 {{"iou_thresh", 0.5}}, {{"gt", gt_path}, {"res", res_path}},
                 {{"metrics", out_path}}, std::nullopt);
  return kExitOk;
}

int cmd_synth(const std::string& config_path, const std::string& out_dir,
              bool crossing, std::optional<std::uint64_t> seed) {
  std::filesystem::create_directories(out_dir);
  SequenceData gt, dets;
  ordered_json config;
  if (crossing) {
    std::tie(gt, dets) = crossing_fixture();
    config = {{"fixture", "crossing"}};
  } else {
    ScenarioConfig cfg;
    if (!config_path.empty()) scenario_config_from_json(load_json(config_path), cfg);
    if (seed) cfg.seed = *seed;
    cfg.validate();
    std::tie(gt, dets) = generate(cfg);
    config = scenario_config_json(cfg);
  }
  const std::string gt_path = out_dir + "/gt.txt";
  const std::string det_path = out_dir + "/det.txt";
  std::ofstream gt_out(gt_path, std::ios::binary), det_out(det_path, std::ios::binary);
  if (!gt_out || !det_out) throw TrackError("cannot write into '" + out_dir + "'");
  write_sequence(gt_out, gt);
  write_sequence(det_out, dets);
  write_manifest(out_dir + "/manifest.json", "synth", config,
                 {{"config", config_path.empty() ? "(defaults)" : config_path}},
                 {{"gt", gt_path}, {"det", det_path}}, seed);
  return kExitOk;
}

int cmd_sweep(const std::string& gt_path, const std::string& det_path,
              const std::string& out_path, std::vector<std::string> costs,
              std::vector<std::string> patch_ious, std::vector<std::string> patching,
              const TrackerFlags& flags) {
  const SequenceData gt = load_mot_file(gt_path, ParseMode::GtOrResult);
  const SequenceData dets = load_mot_file(det_path, ParseMode::Det);

  std::sort(costs.begin(), costs.end());
  std::sort(patch_ious.begin(), patch_ious.end());
  std::sort(patching.begin(), patching.end());

  std::string csv = "cost,patch_iou,patching,hota,deta,assa,mota,idf1\n";
  for (const auto& cost : costs) {
    for (const auto& kind : patch_ious) {
      for (const auto& on : patching) {
        if (on != "on" && on != "off") {
          throw ConfigError("patching grid values must be on|off");
        }
        TrackerConfig cfg = flags.resolve();
        cfg.cost_kind = cost_from_name(cost);
        cfg.patch_iou_kind = iou_kind_from_name(kind);
        if (on == "off") cfg.patch_min = 2.0;  // above every IoU scale
        const auto outputs = run_tracker(dets, cfg);

        std::istringstream res_stream(results_to_string(outputs));
        const SequenceData res =
            parse_mot_file(res_stream, ParseMode::GtOrResult, "sweep");
        const MetricsReport r = evaluate_sequence(gt, res);
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%s,%s,%s,%.2f,%.2f,%.2f,%.2f,%.2f\n",
                      cost.c_str(), kind.c_str(), on.c_str(), 100.0 * r.hota,
                      100.0 * r.deta, 100.0 * r.assa, 100.0 * r.mota,
                      100.0 * r.idf1);
        csv += buf;
      }
    }
  }
  write_text(out_path, csv);
  std::cout << csv;
  write_manifest(out_path + ".manifest.json", "sweep",
                 {{"base", tracker_config_json(flags.resolve())},
                  {"costs", costs},
                  {"patch_ious", patch_ious},
                  {"patching", patching}},
                 {{"gt", gt_path}, {"det", det_path}}, {{"csv", out_path}},
                 std::nullopt);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage detection-to-trajectory association engine"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  auto* track = app.add_subcommand("track", "Associate a detection file");
  std::string det_path, out_path;
  TrackerFlags track_flags;
  track->add_option("--det", det_path, "MOT detection file")->required();
  track->add_option("--out", out_path, "Result file to write")->required();
  track_flags.add_to(*track);

  auto* eval = app.add_subcommand("eval", "Score a result file against gt");
  std::string gt_path, res_path, metrics_path;
  eval->add_option("--gt", gt_path, "Ground-truth file")->required();
  eval->add_option("--res", res_path, "Result file")->required();
  eval->add_option("--out", metrics_path, "Metrics JSON path");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic scenario");
  std::string scenario_path, out_dir;
  bool crossing = false;
  std::optional<std::uint64_t> seed;
  synth->add_option("--config", scenario_path, "Scenario config JSON");
  synth->add_option("--out-dir", out_dir, "Output directory")->required();
  synth->add_flag("--crossing-fixture", crossing, "Emit the fixed crossing fixture");
  synth->add_option_function<std::uint64_t>(
      "--seed", [&seed](std::uint64_t v) { seed = v; }, "Scenario seed override");

  auto* sweep = app.add_subcommand("sweep", "Metrics table over a config grid");
  std::string sweep_gt, sweep_det, sweep_out;
  std::vector<std::string> costs{"area", "height"};
  std::vector<std::string> patch_ious{"ciou"};
  std::vector<std::string> patching{"on"};
  TrackerFlags sweep_flags;
  sweep->add_option("--gt", sweep_gt, "Ground-truth file")->required();
  sweep->add_option("--det", sweep_det, "Detection file")->required();
  sweep->add_option("--out", sweep_out, "CSV path")->required();
  sweep->add_option("--costs", costs, "Cost kinds")->delimiter(',');
  sweep->add_option("--patch-ious", patch_ious, "Patch IoU kinds")->delimiter(',');
  sweep->add_option("--patching", patching, "on,off grid")->delimiter(',');
  sweep_flags.add_to(*sweep);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*track) return cmd_track(det_path, out_path, track_flags);
    if (*eval) return cmd_eval(gt_path, res_path, metrics_path);
    if (*synth) return cmd_synth(scenario_path, out_dir, crossing, seed);
    if (*sweep) {
      return cmd_sweep(sweep_gt, sweep_det, sweep_out, costs, patch_ious,
                       patching, sweep_flags);
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const FrameRangeError& e) {
    std::cerr << "frame range error: " << e.what() << "\n";
    return kExitMismatch;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
