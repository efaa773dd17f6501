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
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtqec/circuit.hpp"
#include "rtqec/noise.hpp"

namespace rtqec {

/// Raised when fault enumeration or graph construction finds a combination that
/// the detector/observable definitions cannot represent.
class InconsistencyError : public std::logic_error {
   public:
    using std::logic_error::logic_error;
};

inline constexpr std::uint32_t kBoundary = std::numeric_limits<std::uint32_t>::max();
inline constexpr std::int64_t kNoMeasurement = -1;

/// One Pauli term of one noise channel together with its detector signature.
struct Fault {
    std::size_t channel;  // index into noise_channels()
    std::size_t term;     // Pauli term within the channel
    std::size_t layer;
    ChannelKind kind;
    double probability;
    std::vector<std::uint32_t> defects;  // sorted detector node ids, size <= 2
    bool flips_observable;
    std::int64_t measurement = kNoMeasurement;  // set for classification flips
};

/// w = -log(p / (1 - p)). Throws std::domain_error unless 0 < p < 1.
double edge_weight(double p);

/// XOR combination of two independent flip probabilities.
inline double xor_probability(double p, double q) { return p + q - 2 * p * q; }

struct Edge {
    std::uint32_t u;
    std::uint32_t v;  // kBoundary for boundary edges
    double probability;
    double weight;
    bool flips_observable;
    /// Measurement record index when a classification flip contributes to this edge.
    std::int64_t measurement = kNoMeasurement;
    /// Merged probability of every contribution other than the classification flip.
    double other_probability = 0;

    bool is_boundary() const { return v == kBoundary; }
};

class DecodingGraph {
   public:
    DecodingGraph() = default;
    DecodingGraph(std::size_t num_detectors, std::vector<Edge> edges);

    std::size_t num_detectors() const { return num_detectors_; }
    /// Node index used for the virtual boundary in adjacency structures.
    std::uint32_t boundary_node() const { return static_cast<std::uint32_t>(num_detectors_); }
    const std::vector<Edge>& edges() const { return edges_; }

    struct Incidence {
        std::uint32_t edge;
        std::uint32_t neighbor;  // boundary_node() for boundary edges
    };
    /// Adjacency including the boundary node as the last entry.
    const std::vector<std::vector<Incidence>>& adjacency() const { return adjacency_; }

    /// Same topology with new edge probabilities (weights recomputed; p == 0 edges dropped).
    /// Measurement tags survive; the non-measurement share of each edge is rescaled.
    DecodingGraph with_probabilities(const std::vector<double>& probabilities) const;

    /// `u v p w obs_flag` per edge, `v = -1` for boundary edges.
    void write_text(std::ostream& out) const;
    std::string to_text() const;
    static DecodingGraph read_text(std::istream& in, std::size_t num_detectors);

   private:
    void build_adjacency();

    std::size_t num_detectors_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<Incidence>> adjacency_;
};

/// Every single Pauli term of every noise channel, propagated through the rest of the
/// circuit. Throws InconsistencyError when a fault produces more than two defects.
std::vector<Fault> enumerate_faults(const Circuit& circuit, const NoiseModel& noise);

/// Merges faults with equal (defects, flips_observable) by XOR combination.
/// Silent faults (no defects, no observable flip) are dropped; a silent observable flip
/// throws InconsistencyError.
DecodingGraph build_graph(const std::vector<Fault>& faults, std::size_t num_detectors);

inline DecodingGraph build_graph(const Circuit& circuit, const NoiseModel& noise) {
    return build_graph(enumerate_faults(circuit, noise), circuit.num_detectors());
}

}  // namespace rtqec
