// Copyright 2026 The Tomoforge Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Error type shared by every tomoforge module.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tomoforge {

enum class Errc {
    NonHermitian,
    NoConvergence,
    DomainError,
    ShapeMismatch,
    DimMismatch,
    InvalidDensityMatrix,
    InvalidPovm,
    InvalidRank,
    InvalidK,
    InvalidArgument,
    EmptyMeasuredSet,
    EmptyUnmeasuredSet,
    ZeroMass,
    ConfigParse,
    Io,
    UnknownMetric,
};

constexpr std::string_view errc_name(Errc code) noexcept {
    switch (code) {
    case Errc::NonHermitian: return "NonHermitian";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::DomainError: return "DomainError";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::DimMismatch: return "DimMismatch";
    case Errc::InvalidDensityMatrix: return "InvalidDensityMatrix";
    case Errc::InvalidPovm: return "InvalidPovm";
    case Errc::InvalidRank: return "InvalidRank";
    case Errc::InvalidK: return "InvalidK";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::EmptyMeasuredSet: return "EmptyMeasuredSet";
    case Errc::EmptyUnmeasuredSet: return "EmptyUnmeasuredSet";
    case Errc::ZeroMass: return "ZeroMass";
    case Errc::ConfigParse: return "ConfigParse";
    case Errc::Io: return "Io";
    case Errc::UnknownMetric: return "UnknownMetric";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string &what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what),
          code_(code) {}

    [[nodiscard]] Errc code() const noexcept { return code_; }

  private:
    Errc code_;
};

} // namespace tomoforge
