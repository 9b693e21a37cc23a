// Copyright 2026 The twobase Authors
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

/// @file twobase.hpp
/// @brief Umbrella header.

#ifndef TWOBASE_TWOBASE_HPP
#define TWOBASE_TWOBASE_HPP

#include "twobase/decimal.hpp"
#include "twobase/state.hpp"
#include "twobase/bases.hpp"
#include "twobase/measure.hpp"
#include "twobase/objective.hpp"
#include "twobase/reconstruct.hpp"
#include "twobase/uniqueness.hpp"
#include "twobase/io.hpp"
#include "twobase/svg.hpp"
#include "twobase/experiments.hpp"

#endif  // TWOBASE_TWOBASE_HPP
