// Copyright 2026 The mitodg Authors. All Rights Reserved.
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

#include "mitodg/core/error.hpp"

namespace mitodg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOutOfBounds: return "OutOfBounds";
    case ErrorCode::kEmptyPool: return "EmptyPool";
    case ErrorCode::kSingularBasis: return "SingularBasis";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kTooFewImages: return "TooFewImages";
    case ErrorCode::kEmptySplit: return "EmptySplit";
    case ErrorCode::kUnsatisfiableCrop: return "UnsatisfiableCrop";
    case ErrorCode::kEmptyGroundTruth: return "EmptyGroundTruth";
    case ErrorCode::kInvalidBounds: return "InvalidBounds";
    case ErrorCode::kImageSmallerThanTile: return "ImageSmallerThanTile";
    case ErrorCode::kDetectorFailure: return "DetectorFailure";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kPolicyParseError: return "PolicyParseError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace mitodg
