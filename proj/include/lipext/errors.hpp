#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lipext {

enum class ErrorCode {
  DimensionMismatch,
  InvalidNorm,
  InvalidTolerance,
  NotSquare,
  NotSymmetric,
  NegativeOrZeroOffDiagonal,
  NonzeroDiagonal,
  TriangleViolation,
  NonzeroBasepoint,
  PreconditionViolation,
  NotAMember,
  EmptyCut,
  BasepointInCut,
  InvalidCut,
  NotUnitDirection,
  TooLarge,
  NotASlackCut,
  IterationOverflow,
  ReductionFailure,
  MalformedDocument,
};

std::string_view to_string(ErrorCode code);

// Every failure in the library is reported through this type. `indices`
// carries the offending node indices (pair, triple, ...) when there are any.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::vector<int> indices = {})
      : std::runtime_error(std::move(message)),
        code_(code),
        indices_(std::move(indices)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::vector<int>& indices() const noexcept { return indices_; }

 private:
  ErrorCode code_;
  std::vector<int> indices_;
};

}  // namespace lipext
