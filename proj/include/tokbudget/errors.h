// Copyright 2026 The tokbudget Authors.
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

#ifndef TOKBUDGET_ERRORS_H_
#define TOKBUDGET_ERRORS_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tokbudget {

// Base class for every error the library throws. `code()` is a stable,
// machine-parsable identifier used by the CLI error line.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message)
      : Error("validation", message) {}
};

class RangeError : public Error {
 public:
  explicit RangeError(const std::string& message) : Error("range", message) {}
};

class InvalidAssignmentError : public Error {
 public:
  explicit InvalidAssignmentError(const std::string& message)
      : Error("invalid_assignment", message) {}
};

class CalibrationError : public Error {
 public:
  explicit CalibrationError(const std::string& message)
      : Error("calibration", message) {}
};

// Empty or zero-width best/worst population in the percentile metric.
class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& message)
      : Error("degenerate_population", message) {}
};

class DivergenceError : public Error {
 public:
  DivergenceError(std::int64_t step, const std::string& message)
      : Error("divergence", message + " (step " + std::to_string(step) + ")"),
        step_(step) {}

  std::int64_t step() const { return step_; }

 private:
  std::int64_t step_;
};

class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& message)
      : Error("protocol_violation", message) {}
};

class TerminalStateError : public Error {
 public:
  explicit TerminalStateError(const std::string& message)
      : Error("terminal_state", message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error("io", message) {}
};

// Artifact files that disagree with each other (levels, hashes, shapes).
class MismatchError : public Error {
 public:
  explicit MismatchError(const std::string& message)
      : Error("mismatch", message) {}
};

}  // namespace tokbudget

#endif  // TOKBUDGET_ERRORS_H_
