#include "patchtrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <json.hpp>

#include "patchtrack/assignment.hpp"
#include "patchtrack/errors.hpp"

namespace patchtrack {

namespace {

constexpr int kAlphaCount = 19;  // 0.05, 0.10, ..., 0.95

double alpha_at(int k) { return 0.05 * (k + 1); }

std::vector<SequenceEntry> frame_entries(const SequenceData& s, int frame) {
  const auto it = s.frames.find(frame);
  if (it == s.frames.end()) return {};
  std::vector<SequenceEntry> out = it->second;
  std::sort(out.begin(), out.end(),
            [](const SequenceEntry& a, const SequenceEntry& b) { return a.id < b.id; });
  return out;
}

int frame_span(const SequenceData& gt, const SequenceData& pred) {
  return std::max(gt.frame_count, pred.frame_count);
}

void require_gt(const SequenceData& gt) {
  if (gt.total_boxes() == 0) {
    throw EmptyGroundTruthError("ground truth has no boxes");
  }
}

}  // namespace

ClearScores clear_mot(const SequenceData& gt, const SequenceData& pred,
                      double iou_thresh) {
  require_gt(gt);
  ClearScores out;
  out.gt_total = static_cast<long long>(gt.total_boxes());

  std::map<int, int> prev_pair;     // gt id -> pred id matched in frame f-1
  std::map<int, int> last_matched;  // gt id -> pred id at its last matched frame

  const int frames = frame_span(gt, pred);
  for (int f = 1; f <= frames; ++f) {
    const auto gts = frame_entries(gt, f);
    const auto prs = frame_entries(pred, f);
    std::vector<char> g_used(gts.size(), 0), p_used(prs.size(), 0);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;

    // Keep still-overlapping correspondences from the previous frame before
    // re-matching; IDSW counts differ without this.
    for (std::size_t i = 0; i < gts.size(); ++i) {
      const auto it = prev_pair.find(gts[i].id);
      if (it == prev_pair.end()) continue;
      for (std::size_t j = 0; j < prs.size(); ++j) {
        if (p_used[j] || prs[j].id != it->second) continue;
        if (iou(gts[i].box, prs[j].box) >= iou_thresh) {
          g_used[i] = 1;
          p_used[j] = 1;
          pairs.emplace_back(i, j);
        }
        break;
      }
    }

    std::vector<std::size_t> g_rest, p_rest;
    for (std::size_t i = 0; i < gts.size(); ++i)
      if (!g_used[i]) g_rest.push_back(i);
    for (std::size_t j = 0; j < prs.size(); ++j)
      if (!p_used[j]) p_rest.push_back(j);

    if (!g_rest.empty() && !p_rest.empty()) {
      const double gate = 1.0 - iou_thresh;
      CostMatrix cost(g_rest.size(), p_rest.size());
      for (std::size_t a = 0; a < g_rest.size(); ++a) {
        for (std::size_t b = 0; b < p_rest.size(); ++b) {
          const double s = iou(gts[g_rest[a]].box, prs[p_rest[b]].box);
          cost.at(a, b) = s >= iou_thresh ? 1.0 - s : 2.0;
        }
      }
      for (const auto& m : hungarian_solve(cost, gate).matches) {
        pairs.emplace_back(g_rest[m.row], p_rest[m.col]);
      }
    }

    prev_pair.clear();
    for (const auto& [gi, pj] : pairs) {
      const int g_id = gts[gi].id;
      const int p_id = prs[pj].id;
      const auto it = last_matched.find(g_id);
      if (it != last_matched.end() && it->second != p_id) out.idsw += 1;
      last_matched[g_id] = p_id;
      prev_pair[g_id] = p_id;
    }
    out.tp += static_cast<long long>(pairs.size());
    out.fn += static_cast<long long>(gts.size() - pairs.size());
    out.fp += static_cast<long long>(prs.size() - pairs.size());
  }

  out.mota = 1.0 - static_cast<double>(out.fp + out.fn + out.idsw) /
                       static_cast<double>(out.gt_total);
  return out;
}

IdScores idf1(const SequenceData& gt, const SequenceData& pred,
              double iou_thresh) {
  require_gt(gt);

  std::map<int, long long> gt_frames_of, pred_frames_of;
  std::map<std::pair<int, int>, long long> overlap;
  const int frames = frame_span(gt, pred);
  for (int f = 1; f <= frames; ++f) {
    const auto gts = frame_entries(gt, f);
    const auto prs = frame_entries(pred, f);
    for (const auto& g : gts) gt_frames_of[g.id] += 1;
    for (const auto& p : prs) pred_frames_of[p.id] += 1;
    for (const auto& g : gts) {
      for (const auto& p : prs) {
        if (iou(g.box, p.box) >= iou_thresh) overlap[{g.id, p.id}] += 1;
      }
    }
  }

  std::vector<int> g_ids, p_ids;
  for (const auto& [id, c] : gt_frames_of) g_ids.push_back(id);
  for (const auto& [id, c] : pred_frames_of) p_ids.push_back(id);
  const std::size_t ng = g_ids.size();
  const std::size_t np = p_ids.size();

  long long total_gt = 0, total_pred = 0;
  for (const auto& [id, c] : gt_frames_of) total_gt += c;
  for (const auto& [id, c] : pred_frames_of) total_pred += c;

  IdScores out;
  if (np > 0) {
    // Identity pairing on the dummy-extended square matrix: a real-real cell
    // costs the frames the pair does not jointly cover; a dummy absorbs an
    // identity entirely.
    const std::size_t n = ng + np;
    CostMatrix cost(n, n, 0.0);
    double max_entry = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double c = 0.0;
        if (i < ng && j < np) {
          long long ov = 0;
          const auto it = overlap.find({g_ids[i], p_ids[j]});
          if (it != overlap.end()) ov = it->second;
          c = static_cast<double>(gt_frames_of[g_ids[i]] +
                                  pred_frames_of[p_ids[j]] - 2 * ov);
        } else if (i < ng) {
          c = static_cast<double>(gt_frames_of[g_ids[i]]);
        } else if (j < np) {
          c = static_cast<double>(pred_frames_of[p_ids[j]]);
        }
        cost.at(i, j) = c;
        max_entry = std::max(max_entry, c);
      }
    }
    for (const auto& m : hungarian_solve(cost, max_entry + 1.0).matches) {
      if (m.row < ng && m.col < np) {
        const auto it = overlap.find({g_ids[m.row], p_ids[m.col]});
        if (it != overlap.end()) out.idtp += it->second;
      }
    }
  }

  out.idfn = total_gt - out.idtp;
  out.idfp = total_pred - out.idtp;
  const double denom = static_cast<double>(2 * out.idtp + out.idfp + out.idfn);
  out.idf1 = denom > 0.0 ? 2.0 * static_cast<double>(out.idtp) / denom : 0.0;
  return out;
}

HotaScores hota(const SequenceData& gt, const SequenceData& pred) {
  require_gt(gt);

  // Dense identity indices.
  std::set<int> g_set, p_set;
  const int frames = frame_span(gt, pred);
  for (int f = 1; f <= frames; ++f) {
    for (const auto& g : frame_entries(gt, f)) g_set.insert(g.id);
    for (const auto& p : frame_entries(pred, f)) p_set.insert(p.id);
  }
  std::map<int, std::size_t> g_idx, p_idx;
  for (int id : g_set) g_idx.emplace(id, g_idx.size());
  for (int id : p_set) p_idx.emplace(id, p_idx.size());
  const std::size_t ng = g_idx.size();
  const std::size_t np = p_idx.size();

  // Pass 1: co-occurrence-weighted potential matches for the global
  // alignment (Jaccard) score.
  std::vector<double> pm(ng * np, 0.0);
  std::vector<long long> g_count(ng, 0), p_count(np, 0);
  for (int f = 1; f <= frames; ++f) {
    const auto gts = frame_entries(gt, f);
    const auto prs = frame_entries(pred, f);
    std::vector<double> sim(gts.size() * prs.size());
    std::vector<double> row_sum(gts.size(), 0.0), col_sum(prs.size(), 0.0);
    for (std::size_t i = 0; i < gts.size(); ++i) {
      for (std::size_t j = 0; j < prs.size(); ++j) {
        const double s = iou(gts[i].box, prs[j].box);
        sim[i * prs.size() + j] = s;
        row_sum[i] += s;
        col_sum[j] += s;
      }
    }
    for (std::size_t i = 0; i < gts.size(); ++i) {
      for (std::size_t j = 0; j < prs.size(); ++j) {
        const double s = sim[i * prs.size() + j];
        const double denom = row_sum[i] + col_sum[j] - s;
        if (denom > 1e-12 && s > 0.0) {
          pm[g_idx[gts[i].id] * np + p_idx[prs[j].id]] += s / denom;
        }
      }
    }
    for (const auto& g : gts) g_count[g_idx[g.id]] += 1;
    for (const auto& p : prs) p_count[p_idx[p.id]] += 1;
  }

  std::vector<double> galign(ng * np, 0.0);
  for (std::size_t g = 0; g < ng; ++g) {
    for (std::size_t p = 0; p < np; ++p) {
      const double m = pm[g * np + p];
      const double denom = static_cast<double>(g_count[g] + p_count[p]) - m;
      galign[g * np + p] = denom > 0.0 ? m / denom : 0.0;
    }
  }

  // Pass 2: per-alpha matching and accumulation.
  std::vector<long long> tp(kAlphaCount, 0), fn(kAlphaCount, 0), fp(kAlphaCount, 0);
  std::vector<std::map<std::pair<std::size_t, std::size_t>, long long>> mc(kAlphaCount);
  for (int f = 1; f <= frames; ++f) {
    const auto gts = frame_entries(gt, f);
    const auto prs = frame_entries(pred, f);
    const std::size_t r = gts.size(), c = prs.size();
    std::vector<double> sim(r * c);
    double max_score = 0.0;
    std::vector<double> score(r * c);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < c; ++j) {
        const double s = iou(gts[i].box, prs[j].box);
        sim[i * c + j] = s;
        const double w = galign[g_idx[gts[i].id] * np + p_idx[prs[j].id]] * s;
        score[i * c + j] = w;
        max_score = std::max(max_score, w);
      }
    }
    for (int k = 0; k < kAlphaCount; ++k) {
      const double alpha = alpha_at(k);
      long long tp_f = 0;
      if (r > 0 && c > 0) {
        // Maximize the summed score over feasible pairs; infeasible cells act
        // as zero-weight padding and are stripped afterwards.
        const std::size_t n = std::max(r, c);
        CostMatrix cost(n, n, max_score + 1.0);
        for (std::size_t i = 0; i < r; ++i) {
          for (std::size_t j = 0; j < c; ++j) {
            if (sim[i * c + j] >= alpha) {
              cost.at(i, j) = (max_score + 1.0) - score[i * c + j];
            }
          }
        }
        for (const auto& m : hungarian_solve(cost, max_score + 2.0).matches) {
          if (m.row < r && m.col < c && sim[m.row * c + m.col] >= alpha) {
            tp_f += 1;
            mc[k][{g_idx[gts[m.row].id], p_idx[prs[m.col].id]}] += 1;
          }
        }
      }
      tp[k] += tp_f;
      fn[k] += static_cast<long long>(r) - tp_f;
      fp[k] += static_cast<long long>(c) - tp_f;
    }
  }

  HotaScores out;
  for (int k = 0; k < kAlphaCount; ++k) {
    double ass_sum = 0.0;
    for (const auto& [pair_idx, cnt] : mc[k]) {
      const double denom = static_cast<double>(g_count[pair_idx.first] +
                                               p_count[pair_idx.second] - cnt);
      ass_sum += static_cast<double>(cnt) *
                 (denom > 0.0 ? static_cast<double>(cnt) / denom : 0.0);
    }
    const long long det_denom = tp[k] + fn[k] + fp[k];
    const double deta =
        det_denom > 0 ? static_cast<double>(tp[k]) / static_cast<double>(det_denom)
                      : 0.0;
    const double assa = tp[k] > 0 ? ass_sum / static_cast<double>(tp[k]) : 0.0;
    const double h = std::sqrt(deta * assa);
    out.per_alpha.emplace_back(alpha_at(k), h);
    out.alpha_counts.push_back({alpha_at(k), tp[k], fn[k], fp[k], ass_sum});
    out.hota += h;
    out.deta += deta;
    out.assa += assa;
  }
  out.hota /= kAlphaCount;
  out.deta /= kAlphaCount;
  out.assa /= kAlphaCount;
  return out;
}

MetricsReport evaluate_sequence(const SequenceData& gt, const SequenceData& pred,
                                double iou_thresh) {
  MetricsReport r;
  const ClearScores cs = clear_mot(gt, pred, iou_thresh);
  const IdScores is = idf1(gt, pred, iou_thresh);
  const HotaScores hs = hota(gt, pred);
  r.mota = cs.mota;
  r.idf1 = is.idf1;
  r.hota = hs.hota;
  r.deta = hs.deta;
  r.assa = hs.assa;
  r.counts = {cs.tp, cs.fp,   cs.fn,   cs.idsw,
              cs.gt_total, is.idtp, is.idfp, is.idfn};
  r.per_alpha = hs.per_alpha;
  r.alpha_counts = hs.alpha_counts;
  return r;
}

MetricsReport combine_reports(std::span<const MetricsReport> reports) {
  MetricsReport out;
  if (reports.empty()) return out;

  std::vector<HotaScores::AlphaCounts> pooled(reports.front().alpha_counts.size());
  for (std::size_t k = 0; k < pooled.size(); ++k) {
    pooled[k].alpha = reports.front().alpha_counts[k].alpha;
  }
  for (const auto& r : reports) {
    out.counts.tp += r.counts.tp;
    out.counts.fp += r.counts.fp;
    out.counts.fn += r.counts.fn;
    out.counts.idsw += r.counts.idsw;
    out.counts.gt_total += r.counts.gt_total;
    out.counts.idtp += r.counts.idtp;
    out.counts.idfp += r.counts.idfp;
    out.counts.idfn += r.counts.idfn;
    for (std::size_t k = 0; k < pooled.size(); ++k) {
      pooled[k].tp += r.alpha_counts[k].tp;
      pooled[k].fn += r.alpha_counts[k].fn;
      pooled[k].fp += r.alpha_counts[k].fp;
      pooled[k].ass_sum += r.alpha_counts[k].ass_sum;
    }
  }

  out.mota = out.counts.gt_total > 0
                 ? 1.0 - static_cast<double>(out.counts.fp + out.counts.fn +
                                             out.counts.idsw) /
                             static_cast<double>(out.counts.gt_total)
                 : 0.0;
  const double id_denom =
      static_cast<double>(2 * out.counts.idtp + out.counts.idfp + out.counts.idfn);
  out.idf1 = id_denom > 0.0
                 ? 2.0 * static_cast<double>(out.counts.idtp) / id_denom
                 : 0.0;

  out.alpha_counts = pooled;
  for (const auto& ac : pooled) {
    const long long det_denom = ac.tp + ac.fn + ac.fp;
    const double deta =
        det_denom > 0 ? static_cast<double>(ac.tp) / static_cast<double>(det_denom)
                      : 0.0;
    const double assa =
        ac.tp > 0 ? ac.ass_sum / static_cast<double>(ac.tp) : 0.0;
    const double h = std::sqrt(deta * assa);
    out.per_alpha.emplace_back(ac.alpha, h);
    out.hota += h;
    out.deta += deta;
    out.assa += assa;
  }
  const double n = static_cast<double>(pooled.size());
  if (n > 0) {
    out.hota /= n;
    out.deta /= n;
    out.assa /= n;
  }
  return out;
}

namespace {

nlohmann::ordered_json report_json_node(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["hota"] = 100.0 * r.hota;
  j["deta"] = 100.0 * r.deta;
  j["assa"] = 100.0 * r.assa;
  j["mota"] = 100.0 * r.mota;
  j["idf1"] = 100.0 * r.idf1;
  j["counts"] = {{"tp", r.counts.tp},         {"fp", r.counts.fp},
                 {"fn", r.counts.fn},         {"idsw", r.counts.idsw},
                 {"gt_total", r.counts.gt_total}, {"idtp", r.counts.idtp},
                 {"idfp", r.counts.idfp},     {"idfn", r.counts.idfn}};
  nlohmann::ordered_json alphas = nlohmann::ordered_json::array();
  for (const auto& [a, h] : r.per_alpha) alphas.push_back({a, 100.0 * h});
  j["per_alpha"] = alphas;
  return j;
}

}  // namespace

std::string metrics_json(
    const std::vector<std::pair<std::string, MetricsReport>>& sequences) {
  nlohmann::ordered_json j;
  std::vector<MetricsReport> reports;
  std::vector<std::pair<std::string, MetricsReport>> named = sequences;
  std::sort(named.begin(), named.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [name, r] : named) {
    j[name] = report_json_node(r);
    reports.push_back(r);
  }
  j["COMBINED"] = report_json_node(combine_reports(reports));
  return j.dump(2);
}

}  // namespace patchtrack
