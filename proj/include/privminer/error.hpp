// Copyright 2026 The privminer Authors
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

namespace privminer {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent input data (malformed files, dimension
/// mismatches, violated preconditions on data). The CLI maps it to exit 2.
class DataError : public Error {
public:
    using Error::Error;
};

/// Invalid arguments or options. The CLI maps it to exit 64.
class UsageError : public Error {
public:
    using Error::Error;
};

/// A named entity (session, run, bootstrap) does not exist.
class NotFoundError : public Error {
public:
    using Error::Error;
};

} // namespace privminer
