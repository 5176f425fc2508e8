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

#include "wbop/multiway.hpp"

#include <benchmark/benchmark.h>

using namespace wbop;

// Gram matrix of a flattened steering stack: the inner kernel of both the
// objective and the correlation maps. range(0) is the number of angles.
static void BM_contract_gram(benchmark::State &state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto stack = random_complex_normal({32, 8, n}, 7);
    const auto c = conj(stack);
    for (auto _ : state)
    {
        auto g = contract(c, stack, {{0, 0}, {1, 1}});
        benchmark::DoNotOptimize(g.data());
    }
}
BENCHMARK(BM_contract_gram)->Arg(50)->Arg(181)->Arg(720);

// Four-way operator acting on a steering stack, the dominant cost of one
// design iteration.
static void BM_contract_operator(benchmark::State &state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto phi = random_complex_normal({32, 8, 32, 8}, 3);
    const auto stack = random_complex_normal({32, 8, n}, 4);
    for (auto _ : state)
    {
        auto out = contract(phi, stack, {{2, 0}, {3, 1}});
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_contract_operator)->Arg(50)->Arg(720);

BENCHMARK_MAIN();
