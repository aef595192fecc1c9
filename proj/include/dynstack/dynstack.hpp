// Copyright 2026 The dynstack Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DYNSTACK_DYNSTACK_HPP
#define DYNSTACK_DYNSTACK_HPP

#include "dynstack/backward.hpp"
#include "dynstack/belief.hpp"
#include "dynstack/forward.hpp"
#include "dynstack/game.hpp"
#include "dynstack/grid.hpp"
#include "dynstack/infinite.hpp"
#include "dynstack/oracle.hpp"
#include "dynstack/prescription.hpp"
#include "dynstack/stage.hpp"

#endif  // DYNSTACK_DYNSTACK_HPP
