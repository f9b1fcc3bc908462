#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace jladder {

enum class ErrorKind {
  NonConvergence,
  BracketInvalid,
  NoCrossing,
  DomainTooSmall,
  TableExhausted,
  ConfigMismatch,
  ConditionTooHigh,
  DeltaDegenerate,
  RangeTooLarge,
  IndexOutOfTower,
  MissingChain,
  InvalidArgument,
  Io,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::BracketInvalid: return "BracketInvalid";
    case ErrorKind::NoCrossing: return "NoCrossing";
    case ErrorKind::DomainTooSmall: return "DomainTooSmall";
    case ErrorKind::TableExhausted: return "TableExhausted";
    case ErrorKind::ConfigMismatch: return "ConfigMismatch";
    case ErrorKind::ConditionTooHigh: return "ConditionTooHigh";
    case ErrorKind::DeltaDegenerate: return "DeltaDegenerate";
    case ErrorKind::RangeTooLarge: return "RangeTooLarge";
    case ErrorKind::IndexOutOfTower: return "IndexOutOfTower";
    case ErrorKind::MissingChain: return "MissingChain";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  // Usage and configuration problems, as opposed to numerical failures.
  bool is_usage() const noexcept {
    return kind_ == ErrorKind::DeltaDegenerate || kind_ == ErrorKind::ConfigMismatch ||
           kind_ == ErrorKind::InvalidArgument || kind_ == ErrorKind::IndexOutOfTower ||
           kind_ == ErrorKind::RangeTooLarge || kind_ == ErrorKind::DomainTooSmall ||
           kind_ == ErrorKind::Io;
  }

 private:
  ErrorKind kind_;
};

}  // namespace jladder
