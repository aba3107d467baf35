// src/error.cpp

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

#include "dannphone/error.hpp"

namespace dannphone {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDimension: return "dimension";
    case ErrorKind::kIndex: return "index";
    case ErrorKind::kTraining: return "training";
    case ErrorKind::kData: return "data";
    case ErrorKind::kBatch: return "batch";
    case ErrorKind::kDomainLabel: return "domain-label";
    case ErrorKind::kConfig: return "configuration";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kSchema: return "schema";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kLookup: return "lookup";
    case ErrorKind::kAlignment: return "alignment";
    case ErrorKind::kUnsupportedFormat: return "unsupported-format";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kTooShort: return "too-short";
    case ErrorKind::kEvaluation: return "evaluation";
    case ErrorKind::kMetric: return "metric";
    case ErrorKind::kInsufficientData: return "insufficient-data";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace dannphone
