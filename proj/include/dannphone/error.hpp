// dannphone/error.hpp

// Copyright 2026  The dannphone Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef DANNPHONE_ERROR_HPP_
#define DANNPHONE_ERROR_HPP_

#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dannphone {

enum class ErrorKind {
  kDimension,
  kIndex,
  kTraining,
  kData,
  kBatch,
  kDomainLabel,
  kConfig,
  kFormat,
  kSchema,
  kValidation,
  kLookup,
  kAlignment,
  kUnsupportedFormat,
  kParse,
  kTooShort,
  kEvaluation,
  kMetric,
  kInsufficientData,
  kIo,
};

std::string_view error_kind_name(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (and the
/// CLI) can tell a shape bug from a bad input file without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(std::string(error_kind_name(kind)) + " error: " +
                           what),
        kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

namespace detail {
inline void append(std::ostringstream &) {}
template <typename T, typename... Rest>
void append(std::ostringstream &os, const T &v, const Rest &...rest) {
  os << v;
  append(os, rest...);
}
}  // namespace detail

template <typename... Args>
[[noreturn]] void fail(ErrorKind kind, const Args &...args) {
  std::ostringstream os;
  detail::append(os, args...);
  throw Error(kind, os.str());
}

/// Prefixes the message of an Error with a stage name, keeping its kind.
template <typename Fn>
auto with_stage(std::string_view stage, Fn &&fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error &e) {
    throw Error(e.kind(), std::string("[stage ") + std::string(stage) + "] " +
                              e.what());
  }
}

}  // namespace dannphone

#endif  // DANNPHONE_ERROR_HPP_
