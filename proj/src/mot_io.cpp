#include "patchtrack/mot_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string_view>

#include "patchtrack/errors.hpp"

namespace patchtrack {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

double parse_real(std::string_view s, std::size_t line_no, const char* what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || s.empty()) {
    throw ParseError(line_no, std::string("bad ") + what + " field '" +
                                  std::string(s) + "'");
  }
  return v;
}

int parse_int(std::string_view s, std::size_t line_no, const char* what) {
  int v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || s.empty()) {
    throw ParseError(line_no, std::string("bad ") + what + " field '" +
                                  std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::vector<Detection> SequenceData::detections(int frame) const {
  std::vector<Detection> out;
  const auto it = frames.find(frame);
  if (it == frames.end()) return out;
  out.reserve(it->second.size());
  for (const auto& e : it->second) out.push_back({frame, e.box, e.score});
  return out;
}

std::size_t SequenceData::total_boxes() const {
  std::size_t n = 0;
  for (const auto& [frame, entries] : frames) n += entries.size();
  return n;
}

SequenceData parse_mot_file(std::istream& in, ParseMode mode, std::string name) {
  SequenceData seq;
  seq.name = std::move(name);
  std::set<std::pair<int, int>> seen;  // (frame, id) in GtOrResult mode

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view stripped = trim(line);
    if (stripped.empty()) continue;

    const auto fields = split_fields(stripped);
    if (fields.size() < 7) {
      throw ParseError(line_no, "expected at least 7 comma-separated fields");
    }

    const int frame = parse_int(fields[0], line_no, "frame");
    if (frame < 1) throw ParseError(line_no, "frame index must be >= 1");
    const int id = parse_int(fields[1], line_no, "id");
    BBox box{parse_real(fields[2], line_no, "bb_left"),
             parse_real(fields[3], line_no, "bb_top"),
             parse_real(fields[4], line_no, "bb_width"),
             parse_real(fields[5], line_no, "bb_height")};
    if (!box.valid()) {
      throw ParseError(line_no, "non-positive box width/height");
    }
    const double conf = parse_real(fields[6], line_no, "conf");

    if (mode == ParseMode::Det) {
      if (conf < 0.0 || conf > 1.0) {
        throw ParseError(line_no, "detection score outside [0, 1]");
      }
      seq.frames[frame].push_back({-1, box, conf});
    } else {
      if (conf == 0.0) {
        // Ignore-flagged ground-truth row; excluded from evaluation.
        seq.frame_count = std::max(seq.frame_count, frame);
        continue;
      }
      if (!seen.insert({frame, id}).second) {
        throw DuplicateIdError(line_no, frame, id);
      }
      seq.frames[frame].push_back({id, box, conf});
    }
    seq.frame_count = std::max(seq.frame_count, frame);
  }
  return seq;
}

SequenceData load_mot_file(const std::string& path, ParseMode mode) {
  std::ifstream in(path);
  if (!in) throw TrackError("cannot open '" + path + "'");
  std::string name = path;
  const std::size_t slash = name.find_last_of('/');
  if (slash != std::string::npos) name = name.substr(slash + 1);
  const std::size_t dot = name.find_last_of('.');
  if (dot != std::string::npos && dot > 0) name = name.substr(0, dot);
  return parse_mot_file(in, mode, name);
}

void write_results(std::ostream& out, std::span<const FrameOutput> outputs) {
  std::vector<const FrameOutput*> ordered;
  ordered.reserve(outputs.size());
  for (const auto& fo : outputs) ordered.push_back(&fo);
  std::sort(ordered.begin(), ordered.end(),
            [](const FrameOutput* a, const FrameOutput* b) {
              return a->frame < b->frame;
            });

  char buf[160];
  for (const FrameOutput* fo : ordered) {
    std::vector<FrameEntry> entries = fo->entries;
    std::sort(entries.begin(), entries.end(),
              [](const FrameEntry& a, const FrameEntry& b) { return a.id < b.id; });
    for (const auto& e : entries) {
      std::snprintf(buf, sizeof(buf), "%d,%d,%.2f,%.2f,%.2f,%.2f,%.2f,-1,-1,-1\n",
                    fo->frame, e.id, e.box.x, e.box.y, e.box.w, e.box.h,
                    e.confidence);
      out << buf;
    }
  }
}

std::string results_to_string(std::span<const FrameOutput> outputs) {
  std::ostringstream oss;
  write_results(oss, outputs);
  return oss.str();
}

void write_sequence(std::ostream& out, const SequenceData& seq) {
  char buf[160];
  for (const auto& [frame, entries] : seq.frames) {
    for (const auto& e : entries) {
      std::snprintf(buf, sizeof(buf), "%d,%d,%.2f,%.2f,%.2f,%.2f,%.2f,-1,-1,-1\n",
                    frame, e.id, e.box.x, e.box.y, e.box.w, e.box.h, e.score);
      out << buf;
    }
  }
}

}  // namespace patchtrack
