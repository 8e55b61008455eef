#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace patchtrack {

/// Base class for every failure this library signals.
class TrackError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input row; carries the 1-based line number.
class ParseError : public TrackError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : TrackError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Repeated (frame, id) pair in a ground-truth or result file.
class DuplicateIdError : public ParseError {
 public:
  DuplicateIdError(std::size_t line, int frame, int id)
      : ParseError(line, "duplicate id " + std::to_string(id) + " in frame " +
                             std::to_string(frame)) {}
};

class ConfigError : public TrackError {
 public:
  using TrackError::TrackError;
};

/// Kalman state whose height (or width) collapsed below the usable floor.
class DegenerateStateError : public TrackError {
 public:
  using TrackError::TrackError;
};

/// step() called with a frame index that does not increase.
class NonMonotonicFrameError : public TrackError {
 public:
  using TrackError::TrackError;
};

class EmptyGroundTruthError : public TrackError {
 public:
  using TrackError::TrackError;
};

/// Result file covers frames outside the ground-truth range.
class FrameRangeError : public TrackError {
 public:
  using TrackError::TrackError;
};

}  // namespace patchtrack
