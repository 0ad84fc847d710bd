#pragma once

#include <stdexcept>
#include <string>

namespace sprlab {

enum class ErrorKind {
  Domain,
  Config,
  PingPongViolation,
  BudgetExceeded,
  InsufficientData,
  NonTermination,
  ShootingDivergence,
  StepFailure,
  CurvatureCertificate,
  VersionMismatch,
  ChecksumMismatch,
  EmptyTail,
  Io,
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Domain: return "Domain";
    case ErrorKind::Config: return "Config";
    case ErrorKind::PingPongViolation: return "PingPongViolation";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::NonTermination: return "NonTermination";
    case ErrorKind::ShootingDivergence: return "ShootingDivergence";
    case ErrorKind::StepFailure: return "StepFailure";
    case ErrorKind::CurvatureCertificate: return "CurvatureCertificate";
    case ErrorKind::VersionMismatch: return "VersionMismatch";
    case ErrorKind::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorKind::EmptyTail: return "EmptyTail";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace sprlab
