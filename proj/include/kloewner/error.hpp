#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kloewner {

enum class ErrorCode {
  BaseNotOnCircle,
  SelfIntersection,
  CurvesIntersect,
  OriginHit,
  NonMonotoneTimes,
  LeavesDisk,
  SlitsIntersect,
  OutOfRange,
  DegeneratePartition,
  TruncationOutOfRange,
  AccuracyNotReached,
  OutsideDomain,
  NotInImage,
  NoConvergence,
  DegenerateWindow,
  PoleHit,
  SingularApproach,
  InvalidDriving,
  ResidualTooLarge,
  IllConditioned,
  NotPositiveDefinite,
  InvalidInput,
  ParseError,
};

std::string_view to_string(ErrorCode code);

// Input-class errors map to CLI exit code 2, the rest to 3.
bool is_input_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, int curve = -1, int sample = -1,
        double value = 0.0);

  ErrorCode code() const noexcept { return code_; }
  int curve() const noexcept { return curve_; }
  int sample() const noexcept { return sample_; }
  // Achieved residual or offending value where meaningful.
  double value() const noexcept { return value_; }

 private:
  ErrorCode code_;
  int curve_;
  int sample_;
  double value_;
};

}  // namespace kloewner
