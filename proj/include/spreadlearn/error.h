// Copyright 2026 The Spreadlearn Authors
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

#ifndef SPREADLEARN_ERROR_H_
#define SPREADLEARN_ERROR_H_

#include <stdexcept>
#include <string>

namespace spreadlearn {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller violated a documented precondition (bad dimensions, out of range
// state index, malformed channel).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Input data or files could not be used (bad magic, truncated file, missing
// class, malformed CSV/JSON).
class DataError : public Error {
 public:
  using Error::Error;
};

// A numerical procedure failed: diverging energy, degenerate evidence,
// singular channel inversion.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace spreadlearn

#endif  // SPREADLEARN_ERROR_H_
