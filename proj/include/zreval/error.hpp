// error.hpp
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
#include <utility>

namespace zreval {

enum class ErrorKind {
  io,                // unreadable/unwritable paths
  parse,             // malformed input file
  validation,        // well-formed input violating a domain invariant
  invalid_argument,  // bad in-memory argument
  internal           // bug / unexpected state
};

// All failures surface as Error. Parsers attach file and 1-based line so
// every rejection names its source.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string file = {},
        int line = 0)
      : std::runtime_error(compose(message, file, line)),
        kind_(kind),
        file_(std::move(file)),
        line_(line) {}

  ErrorKind kind() const { return kind_; }
  const std::string& file() const { return file_; }
  int line() const { return line_; }

 private:
  static std::string compose(const std::string& message,
                             const std::string& file, int line) {
    if (file.empty()) return message;
    if (line <= 0) return file + ": " + message;
    return file + ":" + std::to_string(line) + ": " + message;
  }

  ErrorKind kind_;
  std::string file_;
  int line_;
};

[[noreturn]] inline void fail_parse(const std::string& file, int line,
                                    const std::string& message) {
  throw Error(ErrorKind::parse, message, file, line);
}

[[noreturn]] inline void fail_validation(const std::string& message,
                                         const std::string& file = {},
                                         int line = 0) {
  throw Error(ErrorKind::validation, message, file, line);
}

[[noreturn]] inline void fail_invalid(const std::string& message) {
  throw Error(ErrorKind::invalid_argument, message);
}

[[noreturn]] inline void fail_io(const std::string& message,
                                 const std::string& file = {}) {
  throw Error(ErrorKind::io, message, file);
}

}  // namespace zreval
