#pragma once

#include <stdexcept>
#include <string>

namespace hdmitx {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("configuration-invalid: " + what) {}
};

// Combinational loop guard tripped.
class OscillationError : public Error {
 public:
  explicit OscillationError(const std::string& what) : Error("oscillation: " + what) {}
};

class ContentionError : public Error {
 public:
  explicit ContentionError(const std::string& what) : Error("contention: " + what) {}
};

class FramingError : public Error {
 public:
  explicit FramingError(const std::string& what) : Error("framing: " + what) {}
};

class IncompleteTraceError : public Error {
 public:
  explicit IncompleteTraceError(const std::string& what) : Error("incomplete-trace: " + what) {}
};

class SamplingError : public Error {
 public:
  explicit SamplingError(const std::string& what) : Error("sampling-too-coarse: " + what) {}
};

class MeasurementError : public Error {
 public:
  explicit MeasurementError(const std::string& what) : Error("measurement: " + what) {}
};

class AlignmentError : public Error {
 public:
  explicit AlignmentError(const std::string& what) : Error("alignment: " + what) {}
};

class ResolutionError : public Error {
 public:
  explicit ResolutionError(const std::string& what) : Error("resolution-too-coarse: " + what) {}
};

class InvalidSeedError : public Error {
 public:
  explicit InvalidSeedError(const std::string& what) : Error("invalid-seed: " + what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error("parse: " + what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("io: " + what) {}
};

// Wraps an error with the pipeline stage it came from.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace hdmitx
