// directive_kind.hpp : intentional tags attached to graphlets
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

#include <array>
#include <optional>
#include <string_view>

namespace alia {

enum class DirectiveKind { NOTE, DO, ANTE, POST, CHK, FIND, ACH, KEEP, PUNT, FCN };

inline constexpr std::array<std::string_view, 10> kDirectiveNames{"NOTE", "DO",   "ANTE", "POST", "CHK",
                                                                  "FIND", "ACH",  "KEEP", "PUNT", "FCN"};

inline std::string_view to_string(DirectiveKind k) { return kDirectiveNames[static_cast<size_t>(k)]; }

inline std::optional<DirectiveKind> directive_from_string(std::string_view s) {
  for (size_t i = 0; i < kDirectiveNames.size(); i++)
    if (kDirectiveNames[i] == s) return static_cast<DirectiveKind>(i);
  return std::nullopt;
}

/// Kinds that finish by finding their payload in memory.
inline bool is_goal(DirectiveKind k) {
  return k == DirectiveKind::CHK || k == DirectiveKind::FIND || k == DirectiveKind::ACH || k == DirectiveKind::ANTE;
}

}  // namespace alia
