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

#include "rtqec/matching.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rtqec {

namespace {

// Port of the classic primal-dual blossom algorithm (Galil's formulation). Vertices are
// 0..n-1, blossoms n..2n-1. An endpoint p belongs to edge p/2; endpoint p^1 is its partner.
class BlossomMatcher {
   public:
    BlossomMatcher(std::size_t n, const std::vector<IntEdge>& edges, bool max_cardinality)
        : n_(static_cast<long>(n)), edges_(edges), max_cardinality_(max_cardinality) {}

    std::vector<std::int64_t> solve();

   private:
    using Int = std::int64_t;

    Int slack(long k) const {
        const auto& e = edges_[static_cast<std::size_t>(k)];
        return dual_[e.u] + dual_[e.v] - 2 * e.weight;
    }
    long endpoint(long p) const {
        const auto& e = edges_[static_cast<std::size_t>(p / 2)];
        return static_cast<long>(p % 2 == 0 ? e.u : e.v);
    }

    template <typename Fn>
    void for_leaves(long b, Fn&& fn) const {
        if (b < n_) {
            fn(b);
            return;
        }
        for (long t : childs_[b]) for_leaves(t, fn);
    }
    std::vector<long> leaves(long b) const {
        std::vector<long> out;
        for_leaves(b, [&](long v) { out.push_back(v); });
        return out;
    }

    static long wrap(long j, long size) { return ((j % size) + size) % size; }

    void assign_label(long w, int t, long p);
    long scan_blossom(long v, long w);
    void add_blossom(long base, long k);
    void expand_blossom(long b, bool endstage);
    void augment_blossom(long b, long v);
    void augment_matching(long k);

    long n_;
    const std::vector<IntEdge>& edges_;
    bool max_cardinality_;

    std::vector<std::vector<long>> neighbend_;
    std::vector<long> mate_;
    std::vector<int> label_;
    std::vector<long> labelend_;
    std::vector<long> inblossom_;
    std::vector<long> blossomparent_;
    std::vector<std::vector<long>> childs_;
    std::vector<long> blossombase_;
    std::vector<std::vector<long>> endps_;
    std::vector<long> bestedge_;
    std::vector<std::vector<long>> blossombestedges_;
    std::vector<bool> has_bestedges_;
    std::vector<long> unused_;
    std::vector<Int> dual_;
    std::vector<bool> allowedge_;
    std::vector<long> queue_;
};

void BlossomMatcher::assign_label(long w, int t, long p) {
    long b = inblossom_[w];
    label_[w] = label_[b] = t;
    labelend_[w] = labelend_[b] = p;
    bestedge_[w] = bestedge_[b] = -1;
    if (t == 1) {
        for_leaves(b, [&](long v) { queue_.push_back(v); });
    } else if (t == 2) {
        long base = blossombase_[b];
        assign_label(endpoint(mate_[base]), 1, mate_[base] ^ 1);
    }
}

long BlossomMatcher::scan_blossom(long v, long w) {
    std::vector<long> path;
    long base = -1;
    while (v != -1 || w != -1) {
        long b = inblossom_[v];
        if (label_[b] & 4) {
            base = blossombase_[b];
            break;
        }
        path.push_back(b);
        label_[b] = 5;
        if (labelend_[b] == -1) {
            v = -1;
        } else {
            v = endpoint(labelend_[b]);
            b = inblossom_[v];
            v = endpoint(labelend_[b]);
        }
        if (w != -1) std::swap(v, w);
    }
    for (long b : path) label_[b] = 1;
    return base;
}

void BlossomMatcher::add_blossom(long base, long k) {
    const auto& e = edges_[static_cast<std::size_t>(k)];
    long v = static_cast<long>(e.u), w = static_cast<long>(e.v);
    long bb = inblossom_[base];
    long bv = inblossom_[v];
    long bw = inblossom_[w];
    long b = unused_.back();
    unused_.pop_back();
    blossombase_[b] = base;
    blossomparent_[b] = -1;
    blossomparent_[bb] = b;
    std::vector<long> path;
    std::vector<long> endps;
    while (bv != bb) {
        blossomparent_[bv] = b;
        path.push_back(bv);
        endps.push_back(labelend_[bv]);
        v = endpoint(labelend_[bv]);
        bv = inblossom_[v];
    }
    path.push_back(bb);
    std::reverse(path.begin(), path.end());
    std::reverse(endps.begin(), endps.end());
    endps.push_back(2 * k);
    while (bw != bb) {
        blossomparent_[bw] = b;
        path.push_back(bw);
        endps.push_back(labelend_[bw] ^ 1);
        w = endpoint(labelend_[bw]);
        bw = inblossom_[w];
    }
    childs_[b] = path;
    endps_[b] = endps;
    label_[b] = 1;
    labelend_[b] = labelend_[bb];
    dual_[b] = 0;
    for_leaves(b, [&](long leaf) {
        if (label_[inblossom_[leaf]] == 2) queue_.push_back(leaf);
        inblossom_[leaf] = b;
    });

    std::vector<long> bestedgeto(static_cast<std::size_t>(2 * n_), -1);
    auto consider = [&](long kk) {
        const auto& ek = edges_[static_cast<std::size_t>(kk)];
        long i = static_cast<long>(ek.u), j = static_cast<long>(ek.v);
        if (inblossom_[j] == b) std::swap(i, j);
        long bj = inblossom_[j];
        if (bj != b && label_[bj] == 1 && (bestedgeto[bj] == -1 || slack(kk) < slack(bestedgeto[bj]))) {
            bestedgeto[bj] = kk;
        }
    };
    for (long child : path) {
        if (!has_bestedges_[child]) {
            for_leaves(child, [&](long leaf) {
                for (long p : neighbend_[leaf]) consider(p / 2);
            });
        } else {
            for (long kk : blossombestedges_[child]) consider(kk);
        }
        blossombestedges_[child].clear();
        has_bestedges_[child] = false;
        bestedge_[child] = -1;
    }
    blossombestedges_[b].clear();
    for (long kk : bestedgeto) {
        if (kk != -1) blossombestedges_[b].push_back(kk);
    }
    has_bestedges_[b] = true;
    bestedge_[b] = -1;
    for (long kk : blossombestedges_[b]) {
        if (bestedge_[b] == -1 || slack(kk) < slack(bestedge_[b])) bestedge_[b] = kk;
    }
}

void BlossomMatcher::expand_blossom(long b, bool endstage) {
    for (long s : childs_[b]) {
        blossomparent_[s] = -1;
        if (s < n_) {
            inblossom_[s] = s;
        } else if (endstage && dual_[s] == 0) {
            expand_blossom(s, endstage);
        } else {
            for_leaves(s, [&](long v) { inblossom_[v] = s; });
        }
    }
    if (!endstage && label_[b] == 2) {
        const auto& ch = childs_[b];
        const auto& ep = endps_[b];
        const long size = static_cast<long>(ch.size());
        long entrychild = inblossom_[endpoint(labelend_[b] ^ 1)];
        long j = static_cast<long>(std::find(ch.begin(), ch.end(), entrychild) - ch.begin());
        long jstep, endptrick;
        if (j & 1) {
            j -= size;
            jstep = 1;
            endptrick = 0;
        } else {
            jstep = -1;
            endptrick = 1;
        }
        long p = labelend_[b];
        while (j != 0) {
            label_[endpoint(p ^ 1)] = 0;
            label_[endpoint(ep[wrap(j - endptrick, size)] ^ endptrick ^ 1)] = 0;
            assign_label(endpoint(p ^ 1), 2, p);
            allowedge_[ep[wrap(j - endptrick, size)] / 2] = true;
            j += jstep;
            p = ep[wrap(j - endptrick, size)] ^ endptrick;
            allowedge_[p / 2] = true;
            j += jstep;
        }
        long bv = ch[wrap(j, size)];
        label_[endpoint(p ^ 1)] = label_[bv] = 2;
        labelend_[endpoint(p ^ 1)] = labelend_[bv] = p;
        bestedge_[bv] = -1;
        j += jstep;
        while (ch[wrap(j, size)] != entrychild) {
            bv = ch[wrap(j, size)];
            if (label_[bv] == 1) {
                j += jstep;
                continue;
            }
            long found = -1;
            for (long v : leaves(bv)) {
                if (label_[v] != 0) {
                    found = v;
                    break;
                }
            }
            if (found != -1) {
                label_[found] = 0;
                label_[endpoint(mate_[blossombase_[bv]])] = 0;
                assign_label(found, 2, labelend_[found]);
            }
            j += jstep;
        }
    }
    label_[b] = -1;
    labelend_[b] = -1;
    childs_[b].clear();
    endps_[b].clear();
    blossombase_[b] = -1;
    blossombestedges_[b].clear();
    has_bestedges_[b] = false;
    bestedge_[b] = -1;
    unused_.push_back(b);
}

void BlossomMatcher::augment_blossom(long b, long v) {
    long t = v;
    while (blossomparent_[t] != b) t = blossomparent_[t];
    if (t >= n_) augment_blossom(t, v);
    auto& ch = childs_[b];
    auto& ep = endps_[b];
    const long size = static_cast<long>(ch.size());
    long i = static_cast<long>(std::find(ch.begin(), ch.end(), t) - ch.begin());
    long j = i;
    long jstep, endptrick;
    if (i & 1) {
        j -= size;
        jstep = 1;
        endptrick = 0;
    } else {
        jstep = -1;
        endptrick = 1;
    }
    while (j != 0) {
        j += jstep;
        t = ch[wrap(j, size)];
        long p = ep[wrap(j - endptrick, size)] ^ endptrick;
        if (t >= n_) augment_blossom(t, endpoint(p));
        j += jstep;
        t = ch[wrap(j, size)];
        if (t >= n_) augment_blossom(t, endpoint(p ^ 1));
        mate_[endpoint(p)] = p ^ 1;
        mate_[endpoint(p ^ 1)] = p;
    }
    std::rotate(ch.begin(), ch.begin() + i, ch.end());
    std::rotate(ep.begin(), ep.begin() + i, ep.end());
    blossombase_[b] = blossombase_[ch[0]];
}

void BlossomMatcher::augment_matching(long k) {
    const auto& e = edges_[static_cast<std::size_t>(k)];
    long starts[2][2] = {{static_cast<long>(e.u), 2 * k + 1}, {static_cast<long>(e.v), 2 * k}};
    for (auto& start : starts) {
        long s = start[0];
        long p = start[1];
        while (true) {
            long bs = inblossom_[s];
            if (bs >= n_) augment_blossom(bs, s);
            mate_[s] = p;
            if (labelend_[bs] == -1) break;
            long t = endpoint(labelend_[bs]);
            long bt = inblossom_[t];
            s = endpoint(labelend_[bt]);
            long j = endpoint(labelend_[bt] ^ 1);
            if (bt >= n_) augment_blossom(bt, j);
            mate_[j] = labelend_[bt];
            p = labelend_[bt] ^ 1;
        }
    }
}

std::vector<std::int64_t> BlossomMatcher::solve() {
    const std::size_t n = static_cast<std::size_t>(n_);
    if (edges_.empty() || n == 0) return std::vector<std::int64_t>(n, -1);
    const long nedge = static_cast<long>(edges_.size());

    Int maxweight = 0;
    for (const auto& e : edges_) {
        if (e.u >= n || e.v >= n || e.u == e.v) throw std::invalid_argument("matching: invalid edge");
        maxweight = std::max(maxweight, e.weight);
    }

    neighbend_.assign(n, {});
    for (long k = 0; k < nedge; ++k) {
        neighbend_[edges_[static_cast<std::size_t>(k)].u].push_back(2 * k + 1);
        neighbend_[edges_[static_cast<std::size_t>(k)].v].push_back(2 * k);
    }
    mate_.assign(n, -1);
    label_.assign(2 * n, 0);
    labelend_.assign(2 * n, -1);
    inblossom_.resize(n);
    for (long v = 0; v < n_; ++v) inblossom_[v] = v;
    blossomparent_.assign(2 * n, -1);
    childs_.assign(2 * n, {});
    blossombase_.assign(2 * n, -1);
    for (long v = 0; v < n_; ++v) blossombase_[v] = v;
    endps_.assign(2 * n, {});
    bestedge_.assign(2 * n, -1);
    blossombestedges_.assign(2 * n, {});
    has_bestedges_.assign(2 * n, false);
    unused_.clear();
    for (long b = n_; b < 2 * n_; ++b) unused_.push_back(b);
    dual_.assign(2 * n, 0);
    for (std::size_t v = 0; v < n; ++v) dual_[v] = maxweight;
    allowedge_.assign(static_cast<std::size_t>(nedge), false);

    for (std::size_t stage = 0; stage < n; ++stage) {
        std::fill(label_.begin(), label_.end(), 0);
        std::fill(bestedge_.begin(), bestedge_.end(), -1);
        for (std::size_t b = n; b < 2 * n; ++b) {
            blossombestedges_[b].clear();
            has_bestedges_[b] = false;
        }
        std::fill(allowedge_.begin(), allowedge_.end(), false);
        queue_.clear();
        for (long v = 0; v < n_; ++v) {
            if (mate_[v] == -1 && label_[inblossom_[v]] == 0) assign_label(v, 1, -1);
        }

        bool augmented = false;
        while (true) {
            while (!queue_.empty() && !augmented) {
                long v = queue_.back();
                queue_.pop_back();
                for (long p : neighbend_[v]) {
                    long k = p / 2;
                    long w = endpoint(p);
                    if (inblossom_[v] == inblossom_[w]) continue;
                    Int kslack = 0;
                    if (!allowedge_[k]) {
                        kslack = slack(k);
                        if (kslack <= 0) allowedge_[k] = true;
                    }
                    if (allowedge_[k]) {
                        if (label_[inblossom_[w]] == 0) {
                            assign_label(w, 2, p ^ 1);
                        } else if (label_[inblossom_[w]] == 1) {
                            long base = scan_blossom(v, w);
                            if (base >= 0) {
                                add_blossom(base, k);
                            } else {
                                augment_matching(k);
                                augmented = true;
                                break;
                            }
                        } else if (label_[w] == 0) {
                            label_[w] = 2;
                            labelend_[w] = p ^ 1;
                        }
                    } else if (label_[inblossom_[w]] == 1) {
                        long b = inblossom_[v];
                        if (bestedge_[b] == -1 || kslack < slack(bestedge_[b])) bestedge_[b] = k;
                    } else if (label_[w] == 0) {
                        if (bestedge_[w] == -1 || kslack < slack(bestedge_[w])) bestedge_[w] = k;
                    }
                }
            }
            if (augmented) break;

            int deltatype = -1;
            Int delta = 0;
            long deltaedge = -1;
            long deltablossom = -1;
            if (!max_cardinality_) {
                deltatype = 1;
                delta = *std::min_element(dual_.begin(), dual_.begin() + n_);
            }
            for (long v = 0; v < n_; ++v) {
                if (label_[inblossom_[v]] == 0 && bestedge_[v] != -1) {
                    Int d = slack(bestedge_[v]);
                    if (deltatype == -1 || d < delta) {
                        delta = d;
                        deltatype = 2;
                        deltaedge = bestedge_[v];
                    }
                }
            }
            for (long b = 0; b < 2 * n_; ++b) {
                if (blossomparent_[b] == -1 && label_[b] == 1 && bestedge_[b] != -1) {
                    Int d = slack(bestedge_[b]) / 2;
                    if (deltatype == -1 || d < delta) {
                        delta = d;
                        deltatype = 3;
                        deltaedge = bestedge_[b];
                    }
                }
            }
            for (long b = n_; b < 2 * n_; ++b) {
                if (blossombase_[b] >= 0 && blossomparent_[b] == -1 && label_[b] == 2 &&
                    (deltatype == -1 || dual_[b] < delta)) {
                    delta = dual_[b];
                    deltatype = 4;
                    deltablossom = b;
                }
            }
            if (deltatype == -1) {
                deltatype = 1;
                delta = std::max<Int>(0, *std::min_element(dual_.begin(), dual_.begin() + n_));
            }

            for (long v = 0; v < n_; ++v) {
                if (label_[inblossom_[v]] == 1) {
                    dual_[v] -= delta;
                } else if (label_[inblossom_[v]] == 2) {
                    dual_[v] += delta;
                }
            }
            for (long b = n_; b < 2 * n_; ++b) {
                if (blossombase_[b] >= 0 && blossomparent_[b] == -1) {
                    if (label_[b] == 1) {
                        dual_[b] += delta;
                    } else if (label_[b] == 2) {
                        dual_[b] -= delta;
                    }
                }
            }

            if (deltatype == 1) {
                break;
            } else if (deltatype == 2) {
                allowedge_[deltaedge] = true;
                const auto& e = edges_[static_cast<std::size_t>(deltaedge)];
                long i = static_cast<long>(e.u), j = static_cast<long>(e.v);
                if (label_[inblossom_[i]] == 0) std::swap(i, j);
                queue_.push_back(i);
            } else if (deltatype == 3) {
                allowedge_[deltaedge] = true;
                queue_.push_back(static_cast<long>(edges_[static_cast<std::size_t>(deltaedge)].u));
            } else {
                expand_blossom(deltablossom, false);
            }
        }
        if (!augmented) break;

        for (long b = n_; b < 2 * n_; ++b) {
            if (blossomparent_[b] == -1 && blossombase_[b] >= 0 && label_[b] == 1 && dual_[b] == 0) {
                expand_blossom(b, true);
            }
        }
    }

    std::vector<std::int64_t> out(n, -1);
    for (long v = 0; v < n_; ++v) {
        if (mate_[v] >= 0) out[v] = endpoint(mate_[v]);
    }
    return out;
}

}  // namespace

std::vector<std::int64_t> max_weight_matching(std::size_t num_vertices, const std::vector<IntEdge>& edges,
                                              bool max_cardinality) {
    return BlossomMatcher(num_vertices, edges, max_cardinality).solve();
}

std::optional<std::vector<std::int64_t>> min_weight_perfect_matching(std::size_t num_vertices,
                                                                     const std::vector<RealEdge>& edges) {
    if (num_vertices % 2) return std::nullopt;
    if (num_vertices == 0) return std::vector<std::int64_t>{};
    constexpr double kScale = 1099511627776.0;  // 2^40
    std::int64_t max_scaled = 0;
    std::vector<std::int64_t> scaled(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (!std::isfinite(edges[i].weight) || edges[i].weight < 0) {
            throw std::invalid_argument("min_weight_perfect_matching: weights must be finite and non-negative");
        }
        scaled[i] = std::llround(edges[i].weight * kScale);
        max_scaled = std::max(max_scaled, scaled[i]);
    }
    std::vector<IntEdge> flipped(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
        flipped[i] = {edges[i].u, edges[i].v, max_scaled + 1 - scaled[i]};
    }
    auto mate = max_weight_matching(num_vertices, flipped, true);
    for (auto m : mate) {
        if (m < 0) return std::nullopt;
    }
    return mate;
}

}  // namespace rtqec
