/*
 * Copyright 2026 The vtf Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vtf {

// Process exit codes used by the command-line tool.
enum class ExitCode : int {
  kOk = 0,
  kIoOrConfig = 2,
  kPrecondition = 3,
  kNumerical = 4,
};

// Base class so callers can catch every library failure in one place.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const { return ExitCode::kPrecondition; }
};

// Invalid argument or violated precondition.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Matrix/vector dimensions disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Non-finite values appeared during a computation.
class NumericalError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const override { return ExitCode::kNumerical; }
};

// Training diverged. Carries the last epoch whose loss was still finite
// (-1 when no epoch completed).
class TrainingError : public NumericalError {
 public:
  TrainingError(const std::string& what, long last_finite_epoch)
      : NumericalError(what), last_finite_epoch_(last_finite_epoch) {}
  long last_finite_epoch() const { return last_finite_epoch_; }

 private:
  long last_finite_epoch_;
};

// Malformed input file. Row and column are 1-based; 0 means "not applicable".
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row = 0, std::size_t col = 0)
      : Error(what), row_(row), col_(col) {}
  std::size_t row() const { return row_; }
  std::size_t col() const { return col_; }
  ExitCode exit_code() const override { return ExitCode::kIoOrConfig; }

 private:
  std::size_t row_;
  std::size_t col_;
};

// Input is well-formed but does not match the expected schema.
class SchemaError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const override { return ExitCode::kIoOrConfig; }
};

// Invalid run configuration or command-line usage.
class ConfigError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const override { return ExitCode::kIoOrConfig; }
};

class IoError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const override { return ExitCode::kIoOrConfig; }
};

// No retrain landed in the Rashomon set.
class ExplorationError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const override { return ExitCode::kNumerical; }
};

// Contribution sum too close to zero to normalize.
class NormalizationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace vtf
