// Copyright 2026 The ContextVAE Authors.
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

#pragma once

#include <stdexcept>
#include <string>

namespace contextvae {

enum class ErrorKind {
  kInvalidInput,
  kNotFound,
  kConfiguration,
  kParse,
  kNumerical,
  kUnsupported,
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct InvalidInput : Error {
  explicit InvalidInput(const std::string& m) : Error(ErrorKind::kInvalidInput, m) {}
};
struct NotFound : Error {
  explicit NotFound(const std::string& m) : Error(ErrorKind::kNotFound, m) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& m) : Error(ErrorKind::kConfiguration, m) {}
};
struct ParseError : Error {
  explicit ParseError(const std::string& m) : Error(ErrorKind::kParse, m) {}
};
struct NumericalError : Error {
  explicit NumericalError(const std::string& m) : Error(ErrorKind::kNumerical, m) {}
};
struct Unsupported : Error {
  explicit Unsupported(const std::string& m) : Error(ErrorKind::kUnsupported, m) {}
};
struct IoError : Error {
  explicit IoError(const std::string& m) : Error(ErrorKind::kIo, m) {}
};

}  // namespace contextvae
