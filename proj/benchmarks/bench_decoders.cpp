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

#include <vector>

#include "rtqec/circuit.hpp"
#include "rtqec/decoders.hpp"
#include "rtqec/graph.hpp"
#include "rtqec/sampler.hpp"

using namespace rtqec;

namespace {

// Pre-sampled syndromes so the loop measures decoding only.
struct Workload {
    DecodingGraph graph;
    std::vector<std::vector<std::uint32_t>> syndromes;

    explicit Workload(std::size_t rounds) {
        Circuit circuit = build_stability8(rounds);
        graph = build_graph(circuit, NoiseModel::from_p(0.03));
        for (const auto& s : sample_batch(circuit, NoiseModel::from_p(0.03), 512, 7)) syndromes.push_back(s.defects());
    }
};

template <typename Decoder>
void run_decoder(benchmark::State& state) {
    Workload w(static_cast<std::size_t>(state.range(0)));
    Decoder decoder(w.graph);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(decoder.decode(w.syndromes[i++ % w.syndromes.size()]));
    }
    state.SetItemsProcessed(state.iterations());
}

}  // namespace

static void BM_Mwpm(benchmark::State& state) { run_decoder<MwpmDecoder>(state); }
BENCHMARK(BM_Mwpm)->Arg(6)->Arg(10)->Arg(26)->Unit(benchmark::kMicrosecond);

static void BM_Clustering(benchmark::State& state) { run_decoder<ClusteringDecoder>(state); }
BENCHMARK(BM_Clustering)->Arg(6)->Arg(10)->Arg(26)->Unit(benchmark::kMicrosecond);
