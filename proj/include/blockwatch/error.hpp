#pragma once

#include <stdexcept>
#include <string>

namespace blockwatch {

enum class Errc {
  // ingest
  MissingField,
  NonNumericValue,
  EmptyInput,
  EmptyDataset,
  TargetTooLarge,
  // fetch
  NetworkError,
  RateLimited,
  MalformedResponse,
  // graph / features
  UnknownAccount,
  NoTransactions,
  TooFewTransactions,
  // selection / ml
  SingleClassInput,
  SingleCluster,
  TooFewRows,
  ZeroVector,
  NoMaliciousLabels,
  BadHyperparameter,
  SchemaMismatch,
  LengthMismatch,
  DegenerateMatrix,
  InsufficientTail,
  EmptyVector,
  // plumbing
  IoError,
  ConfigError,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::MissingField: return "MissingField";
    case Errc::NonNumericValue: return "NonNumericValue";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::TargetTooLarge: return "TargetTooLarge";
    case Errc::NetworkError: return "NetworkError";
    case Errc::RateLimited: return "RateLimited";
    case Errc::MalformedResponse: return "MalformedResponse";
    case Errc::UnknownAccount: return "UnknownAccount";
    case Errc::NoTransactions: return "NoTransactions";
    case Errc::TooFewTransactions: return "TooFewTransactions";
    case Errc::SingleClassInput: return "SingleClassInput";
    case Errc::SingleCluster: return "SingleCluster";
    case Errc::TooFewRows: return "TooFewRows";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::NoMaliciousLabels: return "NoMaliciousLabels";
    case Errc::BadHyperparameter: return "BadHyperparameter";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::DegenerateMatrix: return "DegenerateMatrix";
    case Errc::InsufficientTail: return "InsufficientTail";
    case Errc::EmptyVector: return "EmptyVector";
    case Errc::IoError: return "IoError";
    case Errc::ConfigError: return "ConfigError";
  }
  return "UnknownError";
}

/// True for failures caused by inputs, files, config or the network;
/// the CLI maps these to exit code 2, everything else to 1.
inline bool is_io_error(Errc c) {
  switch (c) {
    case Errc::MissingField:
    case Errc::NonNumericValue:
    case Errc::EmptyInput:
    case Errc::NetworkError:
    case Errc::RateLimited:
    case Errc::MalformedResponse:
    case Errc::IoError:
    case Errc::ConfigError:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

  Errc code() const { return code_; }

  /// Backoff hint in seconds, only meaningful for RateLimited.
  int retry_after = 0;

 private:
  Errc code_;
};

}  // namespace blockwatch
