/*
 * Copyright (C) 2026 The tcast Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tcast {

enum class Errc {
  EmptyInput,
  MalformedInput,
  LeadingGap,
  InsufficientData,
  ZeroVariance,
  ZeroRange,
  NotDecomposable,
  InsufficientExtrema,
  ZeroPower,
  InsufficientDonors,
  DegenerateFit,
  NoViableModel,
  ShapeError,
  TrainingDiverged,
  ZeroActual,
  ZeroBaseline,
  ConfigError,
  IoError,
};

constexpr std::string_view to_string(Errc e) noexcept {
  switch (e) {
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::MalformedInput: return "MalformedInput";
    case Errc::LeadingGap: return "LeadingGap";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::ZeroRange: return "ZeroRange";
    case Errc::NotDecomposable: return "NotDecomposable";
    case Errc::InsufficientExtrema: return "InsufficientExtrema";
    case Errc::ZeroPower: return "ZeroPower";
    case Errc::InsufficientDonors: return "InsufficientDonors";
    case Errc::DegenerateFit: return "DegenerateFit";
    case Errc::NoViableModel: return "NoViableModel";
    case Errc::ShapeError: return "ShapeError";
    case Errc::TrainingDiverged: return "TrainingDiverged";
    case Errc::ZeroActual: return "ZeroActual";
    case Errc::ZeroBaseline: return "ZeroBaseline";
    case Errc::ConfigError: return "ConfigError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the `Errc` kinds so
/// callers (and the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace tcast
