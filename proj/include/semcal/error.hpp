// Copyright 2026 The semcal Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SEMCAL_ERROR_HPP_
#define SEMCAL_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace semcal {

// Base of every error raised by the library. The CLI maps these to a
// nonzero exit status, the service to an HTTP status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input line. `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input that breaks a domain invariant (duplicate key, K=0, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A precondition on an in-memory value does not hold (asymmetric agreement
// matrix, probabilities not summing to one, negative entropy, ...).
class InvariantError : public Error {
 public:
  using Error::Error;
};

// Calibration rewards need at least two rollouts.
class GroupTooSmallError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// The external judge could not be reached after all retries.
class JudgeUnavailableError : public Error {
 public:
  explicit JudgeUnavailableError(const std::string& what)
      : Error("judge-unavailable: " + what) {}
};

// The external judge answered with something we cannot interpret.
class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& what)
      : Error("judge protocol error: " + what) {}
};

}  // namespace semcal

#endif  // SEMCAL_ERROR_HPP_
