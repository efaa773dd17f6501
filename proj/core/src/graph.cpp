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

#include "rtqec/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "rtqec/text.hpp"

namespace rtqec {

double edge_weight(double p) {
    if (!(p > 0 && p < 1)) {
        throw std::domain_error("edge_weight: probability must satisfy 0 < p < 1, got " + format_double(p));
    }
    return -std::log(p / (1 - p));
}

DecodingGraph::DecodingGraph(std::size_t num_detectors, std::vector<Edge> edges)
    : num_detectors_(num_detectors), edges_(std::move(edges)) {
    for (const auto& e : edges_) {
        if (e.u >= num_detectors_ || (e.v != kBoundary && e.v >= num_detectors_)) {
            throw std::invalid_argument("edge endpoint outside the detector range");
        }
    }
    build_adjacency();
}

void DecodingGraph::build_adjacency() {
    adjacency_.assign(num_detectors_ + 1, {});
    for (std::uint32_t i = 0; i < edges_.size(); ++i) {
        const Edge& e = edges_[i];
        std::uint32_t v = e.is_boundary() ? boundary_node() : e.v;
        adjacency_[e.u].push_back({i, v});
        adjacency_[v].push_back({i, e.u});
    }
}

DecodingGraph DecodingGraph::with_probabilities(const std::vector<double>& probabilities) const {
    if (probabilities.size() != edges_.size()) {
        throw std::invalid_argument("with_probabilities: one probability per edge required");
    }
    std::vector<Edge> out;
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        if (probabilities[i] <= 0) continue;
        Edge e = edges_[i];
        // Keep the measurement tag; the non-measurement share scales with the new estimate.
        double share = e.probability > 0 ? e.other_probability / e.probability : 1.0;
        e.probability = probabilities[i];
        e.weight = edge_weight(e.probability);
        e.other_probability = std::min(e.probability, share * e.probability);
        out.push_back(e);
    }
    return DecodingGraph(num_detectors_, std::move(out));
}

void DecodingGraph::write_text(std::ostream& out) const {
    for (const auto& e : edges_) {
        out << e.u << ' ' << (e.is_boundary() ? std::string("-1") : std::to_string(e.v)) << ' '
            << format_double(e.probability) << ' ' << format_double(e.weight) << ' ' << (e.flips_observable ? 1 : 0)
            << '\n';
    }
}

std::string DecodingGraph::to_text() const {
    std::ostringstream ss;
    write_text(ss);
    return ss.str();
}

DecodingGraph DecodingGraph::read_text(std::istream& in, std::size_t num_detectors) {
    std::vector<Edge> edges;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        long long u, v;
        double p, w;
        int obs;
        if (!(ls >> u >> v >> p >> w >> obs) || u < 0) {
            throw std::invalid_argument("graph text: malformed line " + std::to_string(line_no));
        }
        Edge e{static_cast<std::uint32_t>(u), v < 0 ? kBoundary : static_cast<std::uint32_t>(v), p, w, obs != 0};
        e.other_probability = p;
        edges.push_back(e);
    }
    return DecodingGraph(num_detectors, std::move(edges));
}

std::vector<Fault> enumerate_faults(const Circuit& circuit, const NoiseModel& noise) {
    const auto channels = noise_channels(circuit, noise);
    const auto& layers = circuit.layers();
    const std::size_t rounds = circuit.rounds();

    // Record index of the first measurement made by each layer.
    std::vector<std::size_t> first_record(layers.size() + 1, 0);
    for (std::size_t li = 0; li < layers.size(); ++li) {
        first_record[li + 1] = first_record[li] + (layers[li].kind == LayerKind::Measure ? layers[li].qubits.size() : 0);
    }

    std::vector<Fault> faults;
    std::vector<std::uint8_t> flips(circuit.num_measurements());
    for (std::size_t ci = 0; ci < channels.size(); ++ci) {
        const NoiseChannel& ch = channels[ci];
        for (std::size_t term = 0; term < ch.num_terms(); ++term) {
            std::fill(flips.begin(), flips.end(), 0);
            if (ch.kind == ChannelKind::MeasurementFlip) {
                flips[ch.measurement] = 1;
            } else {
                PauliFrame frame;
                apply_channel_term(ch, term, frame);
                for (std::size_t li = ch.layer + 1; li < layers.size(); ++li) {
                    const Layer& layer = layers[li];
                    if (layer.kind == LayerKind::Measure) {
                        for (std::size_t k = 0; k < layer.qubits.size(); ++k) {
                            flips[first_record[li] + k] = frame.flips_measurement(layer.qubits[k]);
                        }
                    } else {
                        apply_layer(layer, frame);
                    }
                }
            }

            const auto det = detector_values(flips, rounds);
            Fault f{ci, term, ch.layer, ch.kind, ch.term_probability(), {}, observable_value(flips, rounds) != 0};
            for (std::uint32_t d = 0; d < det.size(); ++d) {
                if (det[d]) f.defects.push_back(d);
            }
            if (f.defects.size() > 2) {
                throw InconsistencyError("fault on layer " + std::to_string(ch.layer) + " produces " +
                                         std::to_string(f.defects.size()) + " defects");
            }
            if (ch.kind == ChannelKind::MeasurementFlip) f.measurement = static_cast<std::int64_t>(ch.measurement);
            faults.push_back(std::move(f));
        }
    }
    return faults;
}

DecodingGraph build_graph(const std::vector<Fault>& faults, std::size_t num_detectors) {
    // Key orders boundary edges after every detector pair sharing the same first node.
    using Key = std::tuple<std::uint32_t, std::uint32_t, bool>;
    std::map<Key, Edge> merged;
    for (const auto& f : faults) {
        if (f.probability <= 0) continue;
        if (f.defects.size() > 2) {
            throw InconsistencyError("fault with more than two defects cannot become a graph edge");
        }
        for (auto d : f.defects) {
            if (d >= num_detectors) throw std::invalid_argument("fault references an unknown detector");
        }
        if (f.defects.empty()) {
            if (f.flips_observable) {
                throw InconsistencyError("undetectable fault flips the observable (channel " +
                                         std::to_string(f.channel) + ", layer " + std::to_string(f.layer) + ")");
            }
            continue;
        }
        std::uint32_t u = f.defects[0];
        std::uint32_t v = f.defects.size() == 2 ? f.defects[1] : kBoundary;
        auto [it, inserted] = merged.try_emplace(Key{u, v, f.flips_observable},
                                                 Edge{u, v, 0.0, 0.0, f.flips_observable});
        Edge& e = it->second;
        e.probability = xor_probability(e.probability, f.probability);
        if (f.measurement != kNoMeasurement && e.measurement == kNoMeasurement) {
            e.measurement = f.measurement;
        } else {
            e.other_probability = xor_probability(e.other_probability, f.probability);
        }
    }

    std::vector<Edge> edges;
    edges.reserve(merged.size());
    for (auto& [key, e] : merged) {
        if (e.probability <= 0) continue;
        e.weight = edge_weight(e.probability);
        edges.push_back(e);
    }
    return DecodingGraph(num_detectors, std::move(edges));
}

}  // namespace rtqec
