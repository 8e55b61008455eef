#include <doctest.h>

#include <sstream>
#include <string>

#include "patchtrack/errors.hpp"
#include "patchtrack/mot_io.hpp"
#include "patchtrack/prng.hpp"

using namespace patchtrack;

namespace {

SequenceData parse_str(const std::string& text, ParseMode mode) {
  std::istringstream in(text);
  return parse_mot_file(in, mode, "test");
}

}  // namespace

TEST_CASE("det mode field mapping") {
  const auto seq = parse_str("1,-1,10,20,30,40,0.9,-1,-1,-1\n", ParseMode::Det);
  REQUIRE(seq.frames.count(1) == 1);
  const auto dets = seq.detections(1);
  REQUIRE(dets.size() == 1);
  CHECK(dets[0].frame == 1);
  CHECK(dets[0].box.x == 10.0);
  CHECK(dets[0].box.y == 20.0);
  CHECK(dets[0].box.w == 30.0);
  CHECK(dets[0].box.h == 40.0);
  CHECK(dets[0].score == 0.9);
  CHECK(seq.frame_count == 1);
}

TEST_CASE("parser rejects malformed rows with line numbers") {
  SUBCASE("non-positive width") {
    try {
      parse_str("1,5,10,20,-3,40,1,-1,-1,-1\n", ParseMode::GtOrResult);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 1);
    }
  }
  SUBCASE("non-numeric field on a later line") {
    try {
      parse_str("1,1,1,1,1,1,1\n2,1,abc,1,1,1,1\n", ParseMode::GtOrResult);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("too few fields") {
    CHECK_THROWS_AS(parse_str("1,2,3\n", ParseMode::Det), ParseError);
  }
  SUBCASE("frame below one") {
    CHECK_THROWS_AS(parse_str("0,1,1,1,1,1,1\n", ParseMode::GtOrResult), ParseError);
  }
  SUBCASE("det score outside [0,1]") {
    CHECK_THROWS_AS(parse_str("1,-1,1,1,1,1,1.5\n", ParseMode::Det), ParseError);
  }
}

TEST_CASE("duplicate (frame, id) rejected in gt mode") {
  const std::string text =
      "1,7,10,20,30,40,1,-1,-1,-1\n"
      "1,7,50,60,30,40,1,-1,-1,-1\n";
  CHECK_THROWS_AS(parse_str(text, ParseMode::GtOrResult), DuplicateIdError);
  // Same id in different frames is fine.
  const auto ok = parse_str("1,7,1,1,1,1,1\n2,7,1,1,1,1,1\n", ParseMode::GtOrResult);
  CHECK(ok.total_boxes() == 2);
}

TEST_CASE("ignore-flagged gt rows are dropped") {
  const auto seq = parse_str(
      "1,1,10,20,30,40,1,-1,-1,-1\n"
      "1,2,50,60,30,40,0,-1,-1,-1\n",
      ParseMode::GtOrResult);
  CHECK(seq.total_boxes() == 1);
  CHECK(seq.frames.at(1)[0].id == 1);
}

TEST_CASE("crlf, blanks and extra trailing fields tolerated") {
  const auto seq = parse_str(
      "1,1,10,20,30,40,1,-1,-1,-1,7,0.5\r\n"
      "\r\n"
      "2,1,10,20,30,40,1\n",
      ParseMode::GtOrResult);
  CHECK(seq.total_boxes() == 2);
  CHECK(seq.frame_count == 2);
}

TEST_CASE("write_results format contract") {
  FrameOutput fo;
  fo.frame = 1;
  fo.entries.push_back({3, BBox{10, 20, 30, 40}, 0.9});
  const std::vector<FrameOutput> outputs{fo};
  CHECK(results_to_string(outputs) == "1,3,10.00,20.00,30.00,40.00,0.90,-1,-1,-1\n");
  CHECK(results_to_string({}).empty());
}

TEST_CASE("write then parse round trip to two decimals") {
  Xoshiro256pp rng(31337);
  std::vector<FrameOutput> outputs;
  for (int f = 1; f <= 25; ++f) {
    FrameOutput fo;
    fo.frame = f;
    const int n = static_cast<int>(rng.uniform(0.0, 5.0));
    for (int i = 0; i < n; ++i) {
      fo.entries.push_back({i + 1,
                            BBox{rng.uniform(-100.0, 900.0), rng.uniform(-100.0, 500.0),
                                 rng.uniform(1.0, 120.0), rng.uniform(1.0, 200.0)},
                            rng.uniform(0.05, 1.0)});
    }
    outputs.push_back(std::move(fo));
  }

  const std::string text = results_to_string(outputs);
  const SequenceData seq = parse_str(text, ParseMode::GtOrResult);

  std::size_t total = 0;
  for (const auto& fo : outputs) total += fo.entries.size();
  CHECK(seq.total_boxes() == total);
  for (const auto& fo : outputs) {
    if (fo.entries.empty()) continue;
    const auto& got = seq.frames.at(fo.frame);
    REQUIRE(got.size() == fo.entries.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].id == fo.entries[i].id);
      CHECK(std::abs(got[i].box.x - fo.entries[i].box.x) <= 0.0051);
      CHECK(std::abs(got[i].box.y - fo.entries[i].box.y) <= 0.0051);
      CHECK(std::abs(got[i].box.w - fo.entries[i].box.w) <= 0.0051);
      CHECK(std::abs(got[i].box.h - fo.entries[i].box.h) <= 0.0051);
      CHECK(std::abs(got[i].score - fo.entries[i].confidence) <= 0.0051);
    }
  }
}

TEST_CASE("parser is total under fuzzing") {
  Xoshiro256pp rng(0xF00D);
  const std::string alphabet = "0123456789.,-+eE abc\t";
  for (int i = 0; i < 10000; ++i) {
    std::string line;
    const int len = static_cast<int>(rng.uniform(0.0, 40.0));
    for (int k = 0; k < len; ++k) {
      line += alphabet[static_cast<std::size_t>(
          rng.uniform(0.0, static_cast<double>(alphabet.size())))];
    }
    line += '\n';
    const ParseMode mode = rng.uniform() < 0.5 ? ParseMode::Det : ParseMode::GtOrResult;
    try {
      const auto seq = parse_str(line, mode);
      (void)seq;
    } catch (const ParseError&) {
      // positioned parse failure is the expected outcome for junk
    }
  }
  CHECK(true);
}
