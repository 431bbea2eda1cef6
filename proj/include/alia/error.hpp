// error.hpp : exception types shared by the engine modules
//
///////////////////////////////////////////////////////////////////////////
//
// Copyright 2026 The alia-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
///////////////////////////////////////////////////////////////////////////

#pragma once

#include <stdexcept>
#include <string>

namespace alia {

/// Malformed graphlet, rule, operator, or payload.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Referenced item (halo fact, tree, rule) does not exist.
class LookupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grammar file or scenario/script file could not be understood.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An a-list could not be turned into a rule, operator, or command.
/// Carries the slot that caused the trouble when there is one.
class CompileError : public std::runtime_error {
 public:
  CompileError(std::string slot, const std::string& msg)
      : std::runtime_error(msg), slot_(std::move(slot)) {}
  const std::string& slot() const { return slot_; }

 private:
  std::string slot_;
};

}  // namespace alia
