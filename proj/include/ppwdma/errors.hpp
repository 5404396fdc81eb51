// Copyright 2026 The ppwdma Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace ppwdma {

/// Input outside the mathematical domain of an operation (x <= 0, coincident points, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// (A^-1 - G) could not be factored to usable accuracy.
class SingularityError : public std::runtime_error {
 public:
  SingularityError(const std::string& what, double condition_estimate)
      : std::runtime_error(what), condition_estimate_(condition_estimate) {}

  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double condition_estimate_;
};

/// Shapes or sizes that do not agree between arguments.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Iterative numerics that failed to terminate as expected.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed control-plane traffic between base stations.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario configuration rejected; the message lists every offending field.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ppwdma
