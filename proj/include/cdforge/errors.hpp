// Copyright 2026 The cdforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace cdforge {

/// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad site index, invalid ansatz spec, unknown config key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Problem too large for a dense code path.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition on a numeric argument does not hold.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Time or parameter outside the domain of a protocol.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Base for failures of the numerics themselves (exit code 3 in the CLI).
class NumericError : public Error {
 public:
  using Error::Error;
};

class DegeneracyError : public NumericError {
 public:
  DegeneracyError(const std::string& what, int level_a, int level_b, double gap)
      : NumericError(what), level_a_(level_a), level_b_(level_b), gap_(gap) {}

  int level_a() const { return level_a_; }
  int level_b() const { return level_b_; }
  double gap() const { return gap_; }

 private:
  int level_a_;
  int level_b_;
  double gap_;
};

class TrackingError : public NumericError {
 public:
  using NumericError::NumericError;
};

class RankDeficiencyError : public NumericError {
 public:
  using NumericError::NumericError;
};

class ConvergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace cdforge
