#include "shallow/error.hpp"

namespace shallow {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NotAProjector: return "NotAProjector";
    case ErrorCode::DimensionError: return "DimensionError";
    case ErrorCode::DegenerateMeans: return "DegenerateMeans";
    case ErrorCode::SingularGram: return "SingularGram";
    case ErrorCode::SingularMeans: return "SingularMeans";
    case ErrorCode::WrongRegime: return "WrongRegime";
    case ErrorCode::NotPositiveSemidefinite: return "NotPositiveSemidefinite";
    case ErrorCode::BetaTooSmall: return "BetaTooSmall";
    case ErrorCode::SingularW1: return "SingularW1";
    case ErrorCode::SingularTruncatedMeans: return "SingularTruncatedMeans";
    case ErrorCode::ProblemTooLarge: return "ProblemTooLarge";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::MissingArtifact: return "MissingArtifact";
  }
  return "Unknown";
}

}  // namespace shallow
