/*
 * Copyright (C) 2026 The ypnosc Authors
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

#ifndef YPNOS_YPNOS_HPP
#define YPNOS_YPNOS_HPP

#include "ypnos/boundary.hpp"
#include "ypnos/core.hpp"
#include "ypnos/expr.hpp"
#include "ypnos/runtime.hpp"
#include "ypnos/safety.hpp"
#include "ypnos/syntax.hpp"

#endif  // YPNOS_YPNOS_HPP
