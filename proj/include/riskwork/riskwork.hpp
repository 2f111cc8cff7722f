// Copyright 2026 The riskwork Authors
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

// Umbrella header. io.hpp and sweep.hpp additionally need nlohmann/json.

#include "riskwork/coherent.hpp"
#include "riskwork/config.hpp"
#include "riskwork/error.hpp"
#include "riskwork/hermitian.hpp"
#include "riskwork/incoherent.hpp"
#include "riskwork/oracle.hpp"
#include "riskwork/permutation.hpp"
#include "riskwork/quantum_model.hpp"
#include "riskwork/utility.hpp"
#include "riskwork/work_stats.hpp"
