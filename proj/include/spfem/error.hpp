#pragma once

#include <stdexcept>
#include <string>

namespace spfem {

enum class Errc {
  TransitionTooLarge,
  BadCellCount,
  NonMonotonePhi,
  BadGeneratingFunction,
  TooFewPoints,
  UnsupportedOrder,
  MissingDerivative,
  IndexOutOfRange,
  NotPlyCell,
  MissingDecomposition,
  IncompatibleBasis,
  QuadratureUnderflow,
  NotSPD,
  ResidualTooLarge,
  RegionMeshMismatch,
  NonPositiveError,
  BadEpsilon,
  BadConfig,
};

inline const char* to_string(Errc c) {
  switch (c) {
    case Errc::TransitionTooLarge:    return "TransitionTooLarge";
    case Errc::BadCellCount:          return "BadCellCount";
    case Errc::NonMonotonePhi:        return "NonMonotonePhi";
    case Errc::BadGeneratingFunction: return "BadGeneratingFunction";
    case Errc::TooFewPoints:          return "TooFewPoints";
    case Errc::UnsupportedOrder:      return "UnsupportedOrder";
    case Errc::MissingDerivative:     return "MissingDerivative";
    case Errc::IndexOutOfRange:       return "IndexOutOfRange";
    case Errc::NotPlyCell:            return "NotPlyCell";
    case Errc::MissingDecomposition:  return "MissingDecomposition";
    case Errc::IncompatibleBasis:     return "IncompatibleBasis";
    case Errc::QuadratureUnderflow:   return "QuadratureUnderflow";
    case Errc::NotSPD:                return "NotSPD";
    case Errc::ResidualTooLarge:      return "ResidualTooLarge";
    case Errc::RegionMeshMismatch:    return "RegionMeshMismatch";
    case Errc::NonPositiveError:      return "NonPositiveError";
    case Errc::BadEpsilon:            return "BadEpsilon";
    case Errc::BadConfig:             return "BadConfig";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace spfem
