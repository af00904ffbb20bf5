#pragma once

#include <stdexcept>
#include <string>

namespace revival {

// Failure categories. The numeric values are part of the C API (see
// revival.h) and must stay in sync with rv_status.
enum class ErrorCode : int {
  kInvalidArgument = 10,
  kDomain = 11,
  kConfiguration = 12,
  kNumeric = 20,
  kSingularOrder = 21,
  kResonanceSingularity = 22,
  kBranchAmbiguity = 23,
  kNoResonance = 24,
  kDegenerateSpectrum = 25,
  kInstability = 26,
  kFit = 27,
  kDetection = 30,
  kIo = 40,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace revival
