#pragma once

#include <stdexcept>
#include <string>

namespace kscluster {

// Violated precondition or malformed input.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Config document failed to parse or validate; `field` names the culprit.
class ConfigError : public ContractError {
 public:
  ConfigError(const std::string& field, const std::string& msg)
      : ContractError(field + ": " + msg), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// An enumeration or memo table would exceed a configured cap.
class CapacityError : public std::runtime_error {
 public:
  CapacityError(const std::string& what_cap, long long limit, long long requested)
      : std::runtime_error(what_cap + " exceeds cap " + std::to_string(limit) +
                           " (requested " + std::to_string(requested) + ")"),
        limit_(limit), requested_(requested) {}
  long long limit() const noexcept { return limit_; }
  long long requested() const noexcept { return requested_; }

 private:
  long long limit_;
  long long requested_;
};

// Objective produced NaN or infinity.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& msg, double parameter)
      : std::runtime_error(msg + " at parameter " + std::to_string(parameter)),
        parameter_(parameter) {}
  double parameter() const noexcept { return parameter_; }

 private:
  double parameter_;
};

}  // namespace kscluster
