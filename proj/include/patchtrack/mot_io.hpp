#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "patchtrack/tracker.hpp"

namespace patchtrack {

enum class ParseMode { Det, GtOrResult };

struct SequenceEntry {
  int id = -1;  // -1 in detection files
  BBox box;
  double score = 0.0;
};

/// One parsed MOT file, grouped by frame. frame_count is the max frame seen.
struct SequenceData {
  std::string name;
  std::map<int, std::vector<SequenceEntry>> frames;
  int frame_count = 0;

  std::vector<Detection> detections(int frame) const;
  std::size_t total_boxes() const;
};

/// Parses the 10-field MOT CSV (frame,id,x,y,w,h,conf,x,y,z). Fields past
/// conf are accepted and ignored; LF and CRLF both accepted. Det mode drops
/// the id column; GtOrResult mode drops ignore-flagged rows (conf = 0) and
/// rejects repeated (frame, id) pairs. Throws ParseError / DuplicateIdError
/// with the offending line number.
SequenceData parse_mot_file(std::istream& in, ParseMode mode,
                            std::string name = {});

/// Convenience file-path overload; throws TrackError when the file cannot be
/// opened.
SequenceData load_mot_file(const std::string& path, ParseMode mode);

/// One line per (frame, id), sorted, fixed 2-decimal coordinates and
/// confidence, trailing "-1,-1,-1", LF endings.
void write_results(std::ostream& out, std::span<const FrameOutput> outputs);

std::string results_to_string(std::span<const FrameOutput> outputs);

/// Same 10-field format for a parsed/generated sequence (gt or det rows).
void write_sequence(std::ostream& out, const SequenceData& seq);

}  // namespace patchtrack
