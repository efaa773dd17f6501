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

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "rtqec/matching.hpp"

using namespace rtqec;

namespace {

// Exhaustive maximum weight matching; cardinality first when requested.
struct Best {
    std::int64_t size = -1;
    std::int64_t weight = std::numeric_limits<std::int64_t>::min();
};

void search(std::size_t n, const std::vector<std::vector<std::int64_t>>& w, std::vector<bool>& used, std::size_t v,
            std::int64_t size, std::int64_t weight, bool max_card, Best& best) {
    while (v < n && used[v]) ++v;
    if (v == n) {
        bool better = max_card ? (size > best.size || (size == best.size && weight > best.weight)) : weight > best.weight;
        if (better) best = {size, weight};
        return;
    }
    used[v] = true;
    search(n, w, used, v + 1, size, weight, max_card, best);
    for (std::size_t u = v + 1; u < n; ++u) {
        if (used[u] || w[v][u] == std::numeric_limits<std::int64_t>::min()) continue;
        used[u] = true;
        search(n, w, used, v + 1, size + 1, weight + w[v][u], max_card, best);
        used[u] = false;
    }
    used[v] = false;
}

Best brute(std::size_t n, const std::vector<IntEdge>& edges, bool max_card) {
    std::vector<std::vector<std::int64_t>> w(n, std::vector<std::int64_t>(n, std::numeric_limits<std::int64_t>::min()));
    for (const auto& e : edges) w[e.u][e.v] = w[e.v][e.u] = std::max(w[e.u][e.v], e.weight);
    std::vector<bool> used(n, false);
    Best best;
    search(n, w, used, 0, 0, 0, max_card, best);
    return best;
}

Best score(const std::vector<std::int64_t>& mate, const std::vector<IntEdge>& edges) {
    Best b{0, 0};
    for (std::size_t v = 0; v < mate.size(); ++v) {
        if (mate[v] < 0) continue;
        EXPECT_EQ(mate[static_cast<std::size_t>(mate[v])], std::int64_t(v));
        if (std::size_t(mate[v]) < v) continue;
        std::int64_t w = std::numeric_limits<std::int64_t>::min();
        for (const auto& e : edges) {
            if ((e.u == v && e.v == std::size_t(mate[v])) || (e.v == v && e.u == std::size_t(mate[v]))) {
                w = std::max(w, e.weight);
            }
        }
        EXPECT_NE(w, std::numeric_limits<std::int64_t>::min()) << "matched along a missing edge";
        ++b.size;
        b.weight += w;
    }
    return b;
}

}  // namespace

TEST(max_weight_matching, empty_and_single_edge) {
    EXPECT_TRUE(max_weight_matching(0, {}, false).empty());
    auto mate = max_weight_matching(2, {{0, 1, 1}}, false);
    EXPECT_EQ(mate, (std::vector<std::int64_t>{1, 0}));
    auto none = max_weight_matching(3, {{0, 1, -5}}, false);
    EXPECT_EQ(none, (std::vector<std::int64_t>{-1, -1, -1}));
}

TEST(max_weight_matching, path_prefers_heavy_middle_unless_cardinality) {
    std::vector<IntEdge> path = {{0, 1, 2}, {1, 2, 5}, {2, 3, 2}};
    auto weight_only = max_weight_matching(4, path, false);
    EXPECT_EQ(weight_only[1], 2);
    auto card = max_weight_matching(4, path, true);
    EXPECT_EQ(card, (std::vector<std::int64_t>{1, 0, 3, 2}));
}

TEST(max_weight_matching, odd_cycle_needs_a_blossom) {
    // Triangle with a pendant: the optimum matches the pendant and the opposite triangle edge.
    std::vector<IntEdge> edges = {{0, 1, 6}, {1, 2, 6}, {0, 2, 6}, {2, 3, 7}, {3, 4, 1}, {4, 5, 6}};
    auto mate = max_weight_matching(6, edges, false);
    Best got = score(mate, edges);
    EXPECT_EQ(got.weight, brute(6, edges, false).weight);
}

TEST(max_weight_matching, agrees_with_exhaustive_search) {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 400; ++trial) {
        std::size_t n = 2 + rng() % 9;
        double density = 0.2 + 0.8 * (rng() % 1000) / 1000.0;
        std::vector<IntEdge> edges;
        for (std::size_t u = 0; u < n; ++u) {
            for (std::size_t v = u + 1; v < n; ++v) {
                if ((rng() % 1000) / 1000.0 < density) edges.push_back({u, v, std::int64_t(rng() % 40) - 5});
            }
        }
        for (bool card : {false, true}) {
            auto mate = max_weight_matching(n, edges, card);
            Best got = score(mate, edges);
            Best want = brute(n, edges, card);
            if (card) ASSERT_EQ(got.size, want.size) << "trial " << trial;
            ASSERT_EQ(got.weight, want.weight) << "trial " << trial << " card " << card;
        }
    }
}

TEST(min_weight_perfect_matching, none_when_impossible) {
    EXPECT_FALSE(min_weight_perfect_matching(3, {{0, 1, 1.0}, {1, 2, 1.0}}).has_value());
    EXPECT_FALSE(min_weight_perfect_matching(4, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}}).has_value());
}

TEST(min_weight_perfect_matching, real_weights_on_a_square) {
    std::vector<RealEdge> square = {{0, 1, 1.5}, {1, 2, 0.25}, {2, 3, 1.5}, {3, 0, 0.5}, {0, 2, 0.1}};
    auto mate = min_weight_perfect_matching(4, square);
    ASSERT_TRUE(mate.has_value());
    EXPECT_EQ(*mate, (std::vector<std::int64_t>{3, 2, 1, 0}));
}

TEST(min_weight_perfect_matching, agrees_with_exhaustive_search) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> wd(0.0, 10.0);
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t n = 2 * (1 + rng() % 5);
        std::vector<RealEdge> edges;
        for (std::size_t u = 0; u < n; ++u) {
            for (std::size_t v = u + 1; v < n; ++v) {
                if (rng() % 3) edges.push_back({u, v, wd(rng)});
            }
        }
        // Brute force over perfect matchings.
        std::vector<std::vector<double>> w(n, std::vector<double>(n, INFINITY));
        for (const auto& e : edges) w[e.u][e.v] = w[e.v][e.u] = e.weight;
        std::vector<bool> used(n, false);
        double best = INFINITY;
        std::function<void(double)> rec = [&](double acc) {
            std::size_t v = 0;
            while (v < n && used[v]) ++v;
            if (v == n) {
                best = std::min(best, acc);
                return;
            }
            used[v] = true;
            for (std::size_t u = v + 1; u < n; ++u) {
                if (used[u] || !std::isfinite(w[v][u])) continue;
                used[u] = true;
                rec(acc + w[v][u]);
                used[u] = false;
            }
            used[v] = false;
        };
        rec(0);
        auto mate = min_weight_perfect_matching(n, edges);
        ASSERT_EQ(mate.has_value(), std::isfinite(best)) << "trial " << trial;
        if (!mate) continue;
        double total = 0;
        for (std::size_t v = 0; v < n; ++v) {
            ASSERT_GE((*mate)[v], 0);
            if (std::size_t((*mate)[v]) > v) total += w[v][(*mate)[v]];
        }
        ASSERT_NEAR(total, best, 1e-9) << "trial " << trial;
    }
}
