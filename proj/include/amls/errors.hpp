// Copyright 2026 The amls-verify Authors. All rights reserved.
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

#ifndef AMLS_ERRORS_HPP
#define AMLS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace amls {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid run parameters, input model or job file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Caller broke an operation's precondition (typically a dimension mismatch).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values produced during inference.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Weight file could not be parsed or describes an invalid network.
class LoadError : public Error {
 public:
  using Error::Error;
};

/// Oracle evaluated outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace amls

#endif  // AMLS_ERRORS_HPP
