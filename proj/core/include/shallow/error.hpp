#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shallow {

enum class ErrorCode {
  RankDeficient,
  NotAProjector,
  DimensionError,
  DegenerateMeans,
  SingularGram,
  SingularMeans,
  WrongRegime,
  NotPositiveSemidefinite,
  BetaTooSmall,
  SingularW1,
  SingularTruncatedMeans,
  ProblemTooLarge,
  Diverged,
  InvalidInput,
  MissingArtifact,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every failure raised by the library. The code lets
/// callers (the CLI in particular) map failures onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace shallow
