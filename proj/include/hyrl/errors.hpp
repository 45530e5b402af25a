#pragma once

#include <stdexcept>
#include <string>

namespace hyrl {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad arguments, malformed config, dimension mismatches.
struct InvalidArgument : Error {
  using Error::Error;
};

// Missing or unreadable artifact files.
struct IoError : Error {
  using Error::Error;
};

// Training finished below the required evaluation bar.
struct TrainingFailed : Error {
  TrainingFailed(const std::string& msg, double rate) : Error(msg), success_rate(rate) {}
  double success_rate;
};

// Non-finite gradients during an optimizer update.
struct DivergenceError : Error {
  using Error::Error;
};

// Restricted policy queried outside its region.
struct OutOfRegion : Error {
  using Error::Error;
};

// Critical set does not split the space into exactly two components.
struct TopologyError : Error {
  using Error::Error;
};

// Extended regions overlap less than the configured minimum.
struct InsufficientOverlap : Error {
  InsufficientOverlap(const std::string& msg, double w) : Error(msg), width(w) {}
  double width;
};

// Hybrid solution exceeded the jump budget.
struct ZenoError : Error {
  using Error::Error;
};

// Pipeline failure tagged with the step that failed.
struct StageError : Error {
  StageError(int step_no, const std::string& msg)
      : Error("step " + std::to_string(step_no) + ": " + msg), step(step_no) {}
  int step;
};

}  // namespace hyrl
