// SPDX-License-Identifier: Apache-2.0
//
// wbop - wideband array manifolds and correlation-shaping operator design
// Copyright (C) 2026 wbop contributors
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

#include "wbop/correlation.hpp"
#include "wbop/manifold.hpp"

#include <benchmark/benchmark.h>

using namespace wbop;

namespace
{

WidebandManifold reference_manifold()
{
    const FrequencyGrid grid(33e9, 1e9, 32);
    return {RingArrayGeometry(8, 3.0 * grid.lowest_wavelength_m()),
            ElementPattern::make_patch(1.0), grid, true};
}

} // namespace

static void BM_steering_grid(benchmark::State &state)
{
    const auto m = reference_manifold();
    const auto angles = default_angle_grid(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
    {
        auto grid = steering_grid(m, angles);
        benchmark::DoNotOptimize(grid.data());
    }
}
BENCHMARK(BM_steering_grid)->Arg(50)->Arg(720);

static void BM_scf_720(benchmark::State &state)
{
    const auto m = reference_manifold();
    const auto angles = default_angle_grid(720);
    const auto grid = steering_grid(m, angles);
    for (auto _ : state)
    {
        auto map = scf_from_grid(grid, angles);
        benchmark::DoNotOptimize(map.values.data());
    }
}
BENCHMARK(BM_scf_720);
