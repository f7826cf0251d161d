#include "smilerisk/error.hpp"

namespace smilerisk {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::IoError: return "IoError";
    case Errc::UnparseableRow: return "UnparseableRow";
    case Errc::MissingCell: return "MissingCell";
    case Errc::NonPositiveVol: return "NonPositiveVol";
    case Errc::DuplicateRow: return "DuplicateRow";
    case Errc::InconsistentForward: return "InconsistentForward";
    case Errc::OffGridCoordinate: return "OffGridCoordinate";
    case Errc::TooFewDates: return "TooFewDates";
    case Errc::NonPositiveValue: return "NonPositiveValue";
    case Errc::AlreadyCentered: return "AlreadyCentered";
    case Errc::NotCentered: return "NotCentered";
    case Errc::GridMismatch: return "GridMismatch";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::DateMisalignment: return "DateMisalignment";
    case Errc::MissingLastSmile: return "MissingLastSmile";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ConfigError: return "ConfigError";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::OutOfDomain: return "OutOfDomain";
    case Errc::SingularB: return "SingularB";
    case Errc::CholeskyFailure: return "CholeskyFailure";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::IndefiniteKernel: return "IndefiniteKernel";
    case Errc::ZeroEigenvalue: return "ZeroEigenvalue";
    case Errc::AllZeroSpectrum: return "AllZeroSpectrum";
    case Errc::SeriesTooShort: return "SeriesTooShort";
    case Errc::NonStationaryFit: return "NonStationaryFit";
    case Errc::InsufficientHistory: return "InsufficientHistory";
    case Errc::NegativeVol: return "NegativeVol";
    case Errc::NonPositiveExpiry: return "NonPositiveExpiry";
    case Errc::TooFewStrikes: return "TooFewStrikes";
    case Errc::EmptySequence: return "EmptySequence";
    case Errc::NegativeStatistic: return "NegativeStatistic";
    case Errc::RankDeficiency: return "RankDeficiency";
  }
  return "Unknown";
}

ErrorCategory category_of(Errc code) {
  return code < Errc::TooFewSamples ? ErrorCategory::Input
                                    : ErrorCategory::Numerical;
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail),
      code_(code) {}

}  // namespace smilerisk
