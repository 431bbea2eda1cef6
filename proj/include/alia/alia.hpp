// alia.hpp : everything but the network service
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
//
// The service lives in alia/server.hpp and needs Boost headers.
//
///////////////////////////////////////////////////////////////////////////

#pragma once

#include "alia/directive_kind.hpp"
#include "alia/director.hpp"
#include "alia/engine.hpp"
#include "alia/error.hpp"
#include "alia/inference.hpp"
#include "alia/kernel.hpp"
#include "alia/language.hpp"
#include "alia/memory.hpp"
#include "alia/perception.hpp"
#include "alia/persist.hpp"
#include "alia/policy.hpp"
#include "alia/semnet.hpp"
#include "alia/shell.hpp"
#include "alia/world.hpp"
