// Copyright 2026 The rtqec Authors
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

#include <benchmark/benchmark.h>

#include "rtqec/circuit.hpp"
#include "rtqec/graph.hpp"
#include "rtqec/sampler.hpp"

using namespace rtqec;

static void BM_SampleShot(benchmark::State& state) {
    Circuit circuit = build_stability8(static_cast<std::size_t>(state.range(0)));
    NoiseModel noise = NoiseModel::from_p(0.03);
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sample_shot(circuit, noise, ++seed));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SampleShot)->Arg(6)->Arg(10)->Arg(26);

static void BM_SampleSoftShot(benchmark::State& state) {
    Circuit circuit = build_stability8(10);
    NoiseModel noise = NoiseModel::from_p(0.03);
    IQModel iq = IQModel::from_assignment_error(0.07);
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sample_soft_shot(circuit, noise, iq, ++seed));
}
BENCHMARK(BM_SampleSoftShot);

static void BM_BuildGraph(benchmark::State& state) {
    Circuit circuit = build_stability8(static_cast<std::size_t>(state.range(0)));
    NoiseModel noise = NoiseModel::from_p(0.03);
    for (auto _ : state) benchmark::DoNotOptimize(build_graph(circuit, noise));
}
BENCHMARK(BM_BuildGraph)->Arg(6)->Arg(10)->Arg(26)->Unit(benchmark::kMillisecond);
