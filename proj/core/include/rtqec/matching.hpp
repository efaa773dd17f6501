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
#include <optional>
#include <vector>

namespace rtqec {

struct IntEdge {
    std::size_t u;
    std::size_t v;
    std::int64_t weight;
};

/// Maximum-weight matching on a general graph with Edmonds' blossom algorithm, O(n^3).
/// All arithmetic is integral, so the result is exactly optimal. With `max_cardinality`
/// the matching maximizes weight among maximum-cardinality matchings.
/// Returns mate[v], or -1 for unmatched vertices.
std::vector<std::int64_t> max_weight_matching(std::size_t num_vertices, const std::vector<IntEdge>& edges,
                                              bool max_cardinality);

struct RealEdge {
    std::size_t u;
    std::size_t v;
    double weight;
};

/// Minimum-weight perfect matching. Weights are rounded to a 2^-40 grid before matching, so
/// the returned matching is within num_vertices * 2^-41 of the real optimum.
/// Returns std::nullopt when no perfect matching exists.
std::optional<std::vector<std::int64_t>> min_weight_perfect_matching(std::size_t num_vertices, const std::vector<RealEdge>& edges);

}  // namespace rtqec
