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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rtqec/graph.hpp"

namespace rtqec {

/// Odd defect count with no path to the boundary.
class InfeasibleError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Shortest-path decoding needs non-negative weights; clamp p to <= 0.5 - 1e-9 before building.
class NegativeWeightError : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

struct DecodeResult {
    std::uint8_t logical_flip = 0;
    /// Matched pairs; the second entry is kBoundary for defects matched to the boundary.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> matching;
    /// Correction as a sorted set of edge indices (GF(2) sum of all matched paths).
    std::vector<std::uint32_t> correction;
    double total_weight = 0;     // matching decoders
    std::size_t grow_steps = 0;  // clustering decoder
};

/// Detectors with odd incidence in `edges` (the GF(2) boundary, boundary node excluded).
std::vector<std::uint32_t> correction_syndrome(const DecodingGraph& graph, std::span<const std::uint32_t> edges);

/// Shortest-path distances between defects and from each defect to the boundary.
/// Paths never pass through the boundary node.
struct DefectDistances {
    std::vector<std::uint32_t> defects;
    std::vector<double> pair;      // row-major k x k, +inf when unreachable
    std::vector<double> boundary;  // +inf when unreachable
    std::vector<std::vector<std::int64_t>> predecessor_edge;  // per defect, per node

    std::size_t size() const { return defects.size(); }
    double between(std::size_t i, std::size_t j) const { return pair[i * defects.size() + j]; }
    /// Edge indices of the stored shortest path from defect i to node `target`.
    std::vector<std::uint32_t> path(const DecodingGraph& graph, std::size_t i, std::uint32_t target) const;
};

/// Dijkstra from every defect. `weights`, when non-empty, overrides the graph's edge weights.
DefectDistances defect_distances(const DecodingGraph& graph, std::span<const std::uint32_t> defects,
                                 std::span<const double> weights = {});

/// Exact minimum-weight perfect matching decoder. The boundary may absorb any number of defects.
class MwpmDecoder {
   public:
    /// Throws NegativeWeightError if any edge weight is negative.
    explicit MwpmDecoder(DecodingGraph graph);

    const DecodingGraph& graph() const { return graph_; }

    DecodeResult decode(std::span<const std::uint32_t> defects) const;
    /// Decodes with per-edge weights replacing the graph's (one entry per edge).
    DecodeResult decode(std::span<const std::uint32_t> defects, std::span<const double> weights) const;

   private:
    DecodingGraph graph_;
};

/// Exhaustive search over all pairings using the same distances as MwpmDecoder.
/// Throws std::length_error for more than 12 defects.
DecodeResult brute_force_matching(const DecodingGraph& graph, std::span<const std::uint32_t> defects,
                                  std::span<const double> weights = {});

/// Weightless Union-Find style clustering decoder: odd clusters grow by half-edges in
/// synchronized steps (ascending root order), merge by size on collision, become neutral on
/// touching the boundary, and are then peeled into a correction.
class ClusteringDecoder {
   public:
    explicit ClusteringDecoder(DecodingGraph graph);

    const DecodingGraph& graph() const { return graph_; }
    DecodeResult decode(std::span<const std::uint32_t> defects) const;

   private:
    DecodingGraph graph_;
};

}  // namespace rtqec
