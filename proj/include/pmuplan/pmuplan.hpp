// Copyright 2026 The Authors.
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

#pragma once

#include "pmuplan/combinatorics.hpp"
#include "pmuplan/errors.hpp"
#include "pmuplan/estimation.hpp"
#include "pmuplan/knapsack.hpp"
#include "pmuplan/measurement.hpp"
#include "pmuplan/network.hpp"
#include "pmuplan/parallel.hpp"
#include "pmuplan/planner.hpp"
#include "pmuplan/report.hpp"
#include "pmuplan/submodularity.hpp"
