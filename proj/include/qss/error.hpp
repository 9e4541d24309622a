// Copyright 2026 The qss Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <stdexcept>
#include <string>

namespace qss {

/// Coarse failure category. Mirrors the status codes of the C API.
enum class ErrorCode {
    InvalidArgument = 1, ///< precondition on an argument violated
    DimensionMismatch,   ///< state/operator sizes do not agree
    Config,              ///< configuration parse or validation failure
    Io,                  ///< file could not be read or written
    Protocol,            ///< protocol-level inconsistency (missing disclosure, ...)
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string &what)
        : std::runtime_error(what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

} // namespace qss
