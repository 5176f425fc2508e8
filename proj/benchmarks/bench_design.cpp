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

#include "wbop/design.hpp"
#include "wbop/manifold.hpp"

#include <benchmark/benchmark.h>

using namespace wbop;

namespace
{

ManifoldGridPair reference_pair(std::size_t batch)
{
    const FrequencyGrid low(33e9, 1e9, 32);
    const FrequencyGrid high(33e9, 12e9, 32);
    const RingArrayGeometry geo(8, 3.0 * low.lowest_wavelength_m());
    const WidebandManifold in(geo, ElementPattern::make_isotropic(), low, true);
    const WidebandManifold tg(geo, ElementPattern::make_isotropic(), high, true);
    return make_grid_pair(in, tg, default_angle_grid(batch));
}

} // namespace

// One batch gradient at the production operator size; the per-iteration cost
// of a design run is this plus one ADAM update.
static void BM_wirtinger_gradient(benchmark::State &state)
{
    const auto pair = reference_pair(static_cast<std::size_t>(state.range(0)));
    const auto phi = random_complex_normal({32, 8, 32, 8}, 1);
    for (auto _ : state)
    {
        auto g = wirtinger_gradient(phi, pair);
        benchmark::DoNotOptimize(g.data());
    }
}
BENCHMARK(BM_wirtinger_gradient)->Arg(50)->Arg(181);

static void BM_adam_step(benchmark::State &state)
{
    const DesignConfig config;
    const auto phi = random_complex_normal({32, 8, 32, 8}, 1);
    const auto grad = random_complex_normal({32, 8, 32, 8}, 2);
    auto st = AdamState::zeros(phi.dims());
    for (auto _ : state)
    {
        auto [next, ns] = adam_step(phi, st, grad, config);
        benchmark::DoNotOptimize(next.data());
    }
}
BENCHMARK(BM_adam_step);
