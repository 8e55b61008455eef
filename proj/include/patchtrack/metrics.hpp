#pragma once

#include <string>
#include <utility>
#include <vector>

#include "patchtrack/mot_io.hpp"

namespace patchtrack {

struct ClearScores {
  double mota = 0.0;
  long long fp = 0;
  long long fn = 0;
  long long idsw = 0;
  long long tp = 0;
  long long gt_total = 0;
};

/// CLEAR-MOT with previous-frame correspondence persistence; remaining pairs
/// are Hungarian-matched maximizing IoU with feasibility IoU >= iou_thresh.
/// Identity switches are counted across gaps. Throws EmptyGroundTruthError.
ClearScores clear_mot(const SequenceData& gt, const SequenceData& pred,
                      double iou_thresh = 0.5);

struct IdScores {
  double idf1 = 0.0;
  long long idtp = 0;
  long long idfp = 0;
  long long idfn = 0;
};

/// Global min-cost bipartite matching between gt and predicted identities
/// where a pair's cost counts frames not jointly covered at IoU >= iou_thresh.
IdScores idf1(const SequenceData& gt, const SequenceData& pred,
              double iou_thresh = 0.5);

struct HotaScores {
  double hota = 0.0;
  double deta = 0.0;
  double assa = 0.0;
  std::vector<std::pair<double, double>> per_alpha;  // (alpha, HOTA_alpha)

  // Detection/association counts per alpha, kept for cross-sequence pooling.
  struct AlphaCounts {
    double alpha = 0.0;
    long long tp = 0;
    long long fn = 0;
    long long fp = 0;
    double ass_sum = 0.0;  // sum of A(c) over TPs
  };
  std::vector<AlphaCounts> alpha_counts;
};

/// HOTA over the standard 19-point alpha grid (0.05 .. 0.95). Per alpha,
/// frames are matched maximizing the Jaccard-alignment-weighted similarity
/// with feasibility IoU >= alpha; top-level scores are means over alpha.
HotaScores hota(const SequenceData& gt, const SequenceData& pred);

struct MetricsCounts {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  long long idsw = 0;
  long long gt_total = 0;
  long long idtp = 0;
  long long idfp = 0;
  long long idfn = 0;
};

/// The five headline scores as fractions in [-inf, 1] plus raw counts.
struct MetricsReport {
  double hota = 0.0;
  double deta = 0.0;
  double assa = 0.0;
  double mota = 0.0;
  double idf1 = 0.0;
  MetricsCounts counts;
  std::vector<std::pair<double, double>> per_alpha;
  std::vector<HotaScores::AlphaCounts> alpha_counts;
};

MetricsReport evaluate_sequence(const SequenceData& gt, const SequenceData& pred,
                                double iou_thresh = 0.5);

/// Count-level pooling across sequences: FP/FN/IDSW/identity counts summed,
/// HOTA recomputed per alpha from pooled detection/association counts (not an
/// average of per-sequence scores).
MetricsReport combine_reports(std::span<const MetricsReport> reports);

/// JSON document {sequence name -> scores, "COMBINED" -> aggregate} with
/// scores as percentages.
std::string metrics_json(
    const std::vector<std::pair<std::string, MetricsReport>>& sequences);

}  // namespace patchtrack
