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

#include "rtqec/decoders.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>

#include "rtqec/matching.hpp"
#include "rtqec/text.hpp"

namespace rtqec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::uint32_t> normalized_defects(const DecodingGraph& graph, std::span<const std::uint32_t> defects) {
    std::vector<std::uint32_t> out(defects.begin(), defects.end());
    std::sort(out.begin(), out.end());
    if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
        throw std::invalid_argument("defect list contains duplicates");
    }
    if (!out.empty() && out.back() >= graph.num_detectors()) {
        throw std::invalid_argument("defect " + std::to_string(out.back()) + " is not a detector of the graph");
    }
    return out;
}

void check_weights(const DecodingGraph& graph, std::span<const double> weights) {
    if (!weights.empty() && weights.size() != graph.edges().size()) {
        throw std::invalid_argument("weight overlay must have one entry per edge");
    }
    for (std::size_t i = 0; i < graph.edges().size(); ++i) {
        double w = weights.empty() ? graph.edges()[i].weight : weights[i];
        if (!(w >= 0)) {
            throw NegativeWeightError("edge " + std::to_string(i) + " has weight " + format_double(w) +
                                      "; clamp its probability to <= 0.5 - 1e-9");
        }
    }
}

DecodeResult finish(const DecodingGraph& graph, const DefectDistances& dist,
                    const std::vector<std::pair<std::size_t, std::size_t>>& pairs, std::size_t boundary_marker) {
    DecodeResult result;
    std::vector<std::uint8_t> used(graph.edges().size(), 0);
    for (auto [i, j] : pairs) {
        std::vector<std::uint32_t> path;
        if (j == boundary_marker) {
            result.matching.emplace_back(dist.defects[i], kBoundary);
            result.total_weight += dist.boundary[i];
            path = dist.path(graph, i, graph.boundary_node());
        } else {
            result.matching.emplace_back(dist.defects[i], dist.defects[j]);
            result.total_weight += dist.between(i, j);
            path = dist.path(graph, i, dist.defects[j]);
        }
        for (auto e : path) used[e] ^= 1;
    }
    for (std::uint32_t e = 0; e < used.size(); ++e) {
        if (used[e]) {
            result.correction.push_back(e);
            result.logical_flip ^= graph.edges()[e].flips_observable ? 1 : 0;
        }
    }
    return result;
}

}  // namespace

std::vector<std::uint32_t> correction_syndrome(const DecodingGraph& graph, std::span<const std::uint32_t> edges) {
    std::vector<std::uint8_t> parity(graph.num_detectors(), 0);
    for (auto e : edges) {
        const Edge& edge = graph.edges().at(e);
        parity[edge.u] ^= 1;
        if (!edge.is_boundary()) parity[edge.v] ^= 1;
    }
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < parity.size(); ++i) {
        if (parity[i]) out.push_back(i);
    }
    return out;
}

std::vector<std::uint32_t> DefectDistances::path(const DecodingGraph& graph, std::size_t i, std::uint32_t target) const {
    std::vector<std::uint32_t> out;
    const auto& pred = predecessor_edge[i];
    std::uint32_t node = target;
    while (node != defects[i]) {
        std::int64_t e = pred[node];
        if (e < 0) throw std::logic_error("no stored path to target");
        out.push_back(static_cast<std::uint32_t>(e));
        const Edge& edge = graph.edges()[static_cast<std::size_t>(e)];
        std::uint32_t other = edge.is_boundary() ? graph.boundary_node() : edge.v;
        node = node == edge.u ? other : edge.u;
    }
    return out;
}

DefectDistances defect_distances(const DecodingGraph& graph, std::span<const std::uint32_t> defects,
                                 std::span<const double> weights) {
    check_weights(graph, weights);
    DefectDistances out;
    out.defects = normalized_defects(graph, defects);
    const std::size_t k = out.defects.size();
    const std::size_t nodes = graph.num_detectors() + 1;
    const std::uint32_t boundary = graph.boundary_node();
    out.pair.assign(k * k, kInf);
    out.boundary.assign(k, kInf);
    out.predecessor_edge.assign(k, std::vector<std::int64_t>(nodes, -1));

    std::vector<std::int64_t> target_slot(nodes, -1);
    for (std::size_t i = 0; i < k; ++i) target_slot[out.defects[i]] = static_cast<std::int64_t>(i);

    std::vector<double> dist(nodes);
    std::vector<std::uint8_t> done(nodes);
    using Item = std::pair<double, std::uint32_t>;
    for (std::size_t s = 0; s < k; ++s) {
        std::fill(dist.begin(), dist.end(), kInf);
        std::fill(done.begin(), done.end(), 0);
        auto& pred = out.predecessor_edge[s];
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        dist[out.defects[s]] = 0;
        heap.emplace(0.0, out.defects[s]);
        std::size_t remaining = k + 1;  // every defect plus the boundary
        while (!heap.empty() && remaining) {
            auto [d, v] = heap.top();
            heap.pop();
            if (done[v]) continue;
            done[v] = 1;
            if (v == boundary || target_slot[v] >= 0) --remaining;
            if (v == boundary) continue;
            for (const auto& inc : graph.adjacency()[v]) {
                double w = weights.empty() ? graph.edges()[inc.edge].weight : weights[inc.edge];
                double nd = d + w;
                if (nd < dist[inc.neighbor]) {
                    dist[inc.neighbor] = nd;
                    pred[inc.neighbor] = inc.edge;
                    heap.emplace(nd, inc.neighbor);
                }
            }
        }
        for (std::size_t j = 0; j < k; ++j) out.pair[s * k + j] = dist[out.defects[j]];
        out.boundary[s] = dist[boundary];
    }
    // Symmetrize so both matchers see identical numbers regardless of search direction.
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) out.pair[j * k + i] = out.pair[i * k + j];
    }
    return out;
}

MwpmDecoder::MwpmDecoder(DecodingGraph graph) : graph_(std::move(graph)) { check_weights(graph_, {}); }

DecodeResult MwpmDecoder::decode(std::span<const std::uint32_t> defects) const { return decode(defects, {}); }

DecodeResult MwpmDecoder::decode(std::span<const std::uint32_t> defects, std::span<const double> weights) const {
    const DefectDistances dist = defect_distances(graph_, defects, weights);
    const std::size_t k = dist.size();
    if (k == 0) return {};

    // Defects 0..k-1, boundary copies k..2k-1; copies pair among themselves for free.
    std::vector<RealEdge> edges;
    edges.reserve(k * k + k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            if (std::isfinite(dist.between(i, j))) edges.push_back({i, j, dist.between(i, j)});
        }
        if (std::isfinite(dist.boundary[i])) edges.push_back({i, k + i, dist.boundary[i]});
    }
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) edges.push_back({k + i, k + j, 0.0});
    }
    auto mate = min_weight_perfect_matching(2 * k, edges);
    if (!mate) {
        throw InfeasibleError("no perfect matching: " + std::to_string(k) + " defects cannot all reach a partner");
    }
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < k; ++i) {
        auto m = static_cast<std::size_t>((*mate)[i]);
        if (m >= k) {
            pairs.emplace_back(i, k);
        } else if (m > i) {
            pairs.emplace_back(i, m);
        }
    }
    return finish(graph_, dist, pairs, k);
}

DecodeResult brute_force_matching(const DecodingGraph& graph, std::span<const std::uint32_t> defects,
                                  std::span<const double> weights) {
    if (defects.size() > 12) {
        throw std::length_error("brute_force_matching supports at most 12 defects, got " +
                                std::to_string(defects.size()));
    }
    const DefectDistances dist = defect_distances(graph, defects, weights);
    const std::size_t k = dist.size();
    if (k == 0) return {};

    std::vector<std::pair<std::size_t, std::size_t>> current, best;
    double best_weight = kInf;
    std::vector<std::uint8_t> matched(k, 0);
    std::function<void(double)> search = [&](double acc) {
        if (acc >= best_weight) return;
        std::size_t i = 0;
        while (i < k && matched[i]) ++i;
        if (i == k) {
            best_weight = acc;
            best = current;
            return;
        }
        matched[i] = 1;
        if (std::isfinite(dist.boundary[i])) {
            current.emplace_back(i, k);
            search(acc + dist.boundary[i]);
            current.pop_back();
        }
        for (std::size_t j = i + 1; j < k; ++j) {
            if (matched[j] || !std::isfinite(dist.between(i, j))) continue;
            matched[j] = 1;
            current.emplace_back(i, j);
            search(acc + dist.between(i, j));
            current.pop_back();
            matched[j] = 0;
        }
        matched[i] = 0;
    };
    search(0.0);
    if (!std::isfinite(best_weight)) {
        throw InfeasibleError("no perfect matching exists for the given defects");
    }
    std::sort(best.begin(), best.end());
    return finish(graph, dist, best, k);
}

ClusteringDecoder::ClusteringDecoder(DecodingGraph graph) : graph_(std::move(graph)) {}

DecodeResult ClusteringDecoder::decode(std::span<const std::uint32_t> defects) const {
    const auto sorted = normalized_defects(graph_, defects);
    DecodeResult result;
    if (sorted.empty()) return result;

    const std::size_t nodes = graph_.num_detectors() + 1;
    const std::uint32_t boundary = graph_.boundary_node();
    const auto& edges = graph_.edges();
    const auto& adjacency = graph_.adjacency();

    std::vector<std::uint32_t> parent(nodes);
    std::iota(parent.begin(), parent.end(), 0u);
    std::vector<std::vector<std::uint32_t>> members(nodes);
    std::vector<std::uint8_t> odd(nodes, 0), touches_boundary(nodes, 0), marked(nodes, 0);
    for (std::uint32_t v = 0; v < nodes; ++v) members[v] = {v};
    for (auto d : sorted) odd[d] = marked[d] = 1;
    touches_boundary[boundary] = 1;

    auto find = [&](std::uint32_t v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };
    auto unite = [&](std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (members[a].size() < members[b].size() || (members[a].size() == members[b].size() && b < a)) {
            std::swap(a, b);
        }
        parent[b] = a;
        members[a].insert(members[a].end(), members[b].begin(), members[b].end());
        members[b].clear();
        members[b].shrink_to_fit();
        odd[a] ^= odd[b];
        touches_boundary[a] |= touches_boundary[b];
    };

    std::vector<std::uint8_t> support(edges.size(), 0);
    std::vector<std::uint32_t> active;
    std::vector<std::uint32_t> completed;
    while (true) {
        active.clear();
        for (std::uint32_t v = 0; v < nodes; ++v) {
            if (parent[v] == v && odd[v] && !touches_boundary[v]) active.push_back(v);
        }
        if (active.empty()) break;
        ++result.grow_steps;
        completed.clear();
        bool grew = false;
        for (auto root : active) {
            for (auto v : members[root]) {
                for (const auto& inc : adjacency[v]) {
                    if (support[inc.edge] >= 2) continue;
                    grew = true;
                    if (++support[inc.edge] == 2) completed.push_back(inc.edge);
                }
            }
        }
        if (!grew) {
            throw InfeasibleError("odd cluster cannot grow: component without a boundary path");
        }
        for (auto e : completed) {
            unite(edges[e].u, edges[e].is_boundary() ? boundary : edges[e].v);
        }
    }

    // Peel a spanning forest of the fully grown edges, rooted at the boundary when reachable.
    std::vector<std::vector<DecodingGraph::Incidence>> grown(nodes);
    for (std::uint32_t e = 0; e < edges.size(); ++e) {
        if (support[e] < 2) continue;
        std::uint32_t v = edges[e].is_boundary() ? boundary : edges[e].v;
        grown[edges[e].u].push_back({e, v});
        grown[v].push_back({e, edges[e].u});
    }
    std::vector<std::int64_t> tree_edge(nodes, -1);
    std::vector<std::uint32_t> tree_parent(nodes, 0);
    std::vector<std::uint8_t> seen(nodes, 0);
    std::vector<std::uint32_t> order;
    auto bfs = [&](std::uint32_t root) {
        std::size_t head = order.size();
        seen[root] = 1;
        order.push_back(root);
        while (head < order.size()) {
            std::uint32_t v = order[head++];
            for (const auto& inc : grown[v]) {
                if (seen[inc.neighbor]) continue;
                seen[inc.neighbor] = 1;
                tree_edge[inc.neighbor] = inc.edge;
                tree_parent[inc.neighbor] = v;
                order.push_back(inc.neighbor);
            }
        }
    };
    bfs(boundary);
    for (std::uint32_t v = 0; v < boundary; ++v) {
        if (!seen[v] && !grown[v].empty()) bfs(v);
    }

    std::vector<std::uint8_t> used(edges.size(), 0);
    for (std::size_t idx = order.size(); idx-- > 0;) {
        std::uint32_t v = order[idx];
        if (!marked[v] || v == boundary) continue;
        if (tree_edge[v] < 0) {
            throw std::logic_error("clustering peel left an unpaired defect at a tree root");
        }
        used[static_cast<std::size_t>(tree_edge[v])] ^= 1;
        marked[v] = 0;
        marked[tree_parent[v]] ^= 1;
    }
    for (std::uint32_t e = 0; e < used.size(); ++e) {
        if (used[e]) {
            result.correction.push_back(e);
            result.logical_flip ^= edges[e].flips_observable ? 1 : 0;
        }
    }
    return result;
}

}  // namespace rtqec
