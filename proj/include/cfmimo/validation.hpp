// SPDX-License-Identifier: Apache-2.0
//
// cfmimo - stochastic-geometry toolkit for cell-free Massive MIMO
// Copyright (C) 2026 The cfmimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef CFMIMO_VALIDATION_HPP
#define CFMIMO_VALIDATION_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace cfmimo
{

struct CheckResult
{
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Oracle and property checks over every module. `quick` reduces the
/// Monte-Carlo sizes (and widens tolerances accordingly).
std::vector<CheckResult> run_validation(bool quick, std::uint64_t seed, unsigned workers);

} // namespace cfmimo

#endif
