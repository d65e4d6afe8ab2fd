// Copyright 2026 The dpsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "dpsynth/benchmark.hpp"
#include "dpsynth/binning.hpp"
#include "dpsynth/codebook.hpp"
#include "dpsynth/csv.hpp"
#include "dpsynth/errors.hpp"
#include "dpsynth/experiment.hpp"
#include "dpsynth/ipf.hpp"
#include "dpsynth/metrics.hpp"
#include "dpsynth/noise.hpp"
#include "dpsynth/rng.hpp"
#include "dpsynth/synth.hpp"
#include "dpsynth/table.hpp"
