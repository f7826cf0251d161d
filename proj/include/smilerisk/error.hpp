#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace smilerisk {

enum class Errc {
  // ingestion and data shape
  IoError,
  UnparseableRow,
  MissingCell,
  NonPositiveVol,
  DuplicateRow,
  InconsistentForward,
  OffGridCoordinate,
  TooFewDates,
  NonPositiveValue,
  AlreadyCentered,
  NotCentered,
  GridMismatch,
  ShapeMismatch,
  DateMisalignment,
  MissingLastSmile,
  InvalidArgument,
  ConfigError,
  // numerical failures
  TooFewSamples,
  OutOfDomain,
  SingularB,
  CholeskyFailure,
  NoConvergence,
  IndefiniteKernel,
  ZeroEigenvalue,
  AllZeroSpectrum,
  SeriesTooShort,
  NonStationaryFit,
  InsufficientHistory,
  NegativeVol,
  NonPositiveExpiry,
  TooFewStrikes,
  EmptySequence,
  NegativeStatistic,
  RankDeficiency,
};

enum class ErrorCategory { Input, Numerical };

std::string_view to_string(Errc code);
ErrorCategory category_of(Errc code);

/// Exception carrying a machine-readable code. The message already contains
/// the code name, so `what()` is self-describing.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);

  Errc code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  Errc code_;
};

}  // namespace smilerisk
