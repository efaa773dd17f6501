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

#include "rtqec/circuit.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rtqec {

QubitLayout QubitLayout::ring8() {
    QubitLayout layout;
    layout.data_labels = {43, 37, 45, 51};
    layout.ancilla_labels = {36, 38, 52, 50};
    for (std::size_t a = 0; a < kNumAncilla; ++a) {
        layout.supports[a] = {a, (a + 1) % kNumData};
    }
    return layout;
}

void QubitLayout::validate() const {
    std::array<int, kNumData> uses{};
    for (const auto& [d0, d1] : supports) {
        if (d0 >= kNumData || d1 >= kNumData || d0 == d1) {
            throw std::invalid_argument("stabilizer support must name two distinct data qubits");
        }
        ++uses[d0];
        ++uses[d1];
    }
    if (std::any_of(uses.begin(), uses.end(), [](int u) { return u != 2; })) {
        throw std::invalid_argument("every data qubit must appear in exactly two stabilizer supports");
    }
    // Walk the ring ancilla -> shared data qubit -> next ancilla and require a single 8-cycle.
    std::size_t visited = 0;
    std::size_t a = 0;
    std::size_t via = supports[0].first;
    do {
        std::size_t next = supports[a].first == via ? supports[a].second : supports[a].first;
        std::size_t b = kNumAncilla;
        for (std::size_t c = 0; c < kNumAncilla; ++c) {
            if (c != a && (supports[c].first == next || supports[c].second == next)) {
                b = c;
                break;
            }
        }
        if (b == kNumAncilla) {
            throw std::invalid_argument("stabilizer supports do not form a ring");
        }
        a = b;
        via = next;
        ++visited;
    } while (a != 0 && visited <= kNumAncilla);
    if (visited != kNumAncilla) {
        throw std::invalid_argument("stabilizer supports do not form a single ring of 8 qubits");
    }
}

const char* to_string(LayerKind kind) {
    switch (kind) {
        case LayerKind::PrepareData:
            return "prepare_x";
        case LayerKind::AncillaBasisChange:
            return "h";
        case LayerKind::Entangle:
            return "cz";
        case LayerKind::Measure:
            return "measure";
    }
    return "?";
}

Circuit::Circuit(QubitLayout layout, std::size_t rounds, std::vector<Layer> layers,
                 std::vector<MeasurementInfo> measurements)
    : layout_(std::move(layout)), rounds_(rounds), layers_(std::move(layers)), measurements_(std::move(measurements)) {}

double Circuit::duration_ns() const {
    return std::accumulate(layers_.begin(), layers_.end(), 0.0,
                           [](double acc, const Layer& l) { return acc + l.duration_ns; });
}

void Circuit::write_text(std::ostream& out) const {
    for (const auto& layer : layers_) {
        out << to_string(layer.kind) << ' ' << layer.round << ' ';
        if (layer.kind == LayerKind::Entangle) {
            for (std::size_t i = 0; i + 1 < layer.qubits.size(); i += 2) {
                out << (i ? "," : "") << int(layer.qubits[i]) << '-' << int(layer.qubits[i + 1]);
            }
        } else {
            for (std::size_t i = 0; i < layer.qubits.size(); ++i) {
                out << (i ? "," : "") << int(layer.qubits[i]);
            }
        }
        out << ' ' << layer.duration_ns << '\n';
    }
}

std::string Circuit::to_text() const {
    std::ostringstream ss;
    write_text(ss);
    return ss.str();
}

Circuit build_stability8(std::size_t rounds, const QubitLayout& layout, const LayerTimings& timings) {
    if (rounds == 0) {
        throw std::invalid_argument("build_stability8: rounds must be >= 1");
    }
    layout.validate();

    std::vector<std::uint8_t> data(kNumData);
    std::vector<std::uint8_t> ancillas(kNumAncilla);
    for (std::size_t i = 0; i < kNumData; ++i) data[i] = data_qubit(i);
    for (std::size_t a = 0; a < kNumAncilla; ++a) ancillas[a] = ancilla_qubit(a);

    // Each CZ sub-layer pairs every ancilla with one of its two data qubits; the pairs are
    // disjoint because each data qubit is the first support of exactly one ancilla on the ring.
    std::vector<std::uint8_t> first_pairs;
    std::vector<std::uint8_t> second_pairs;
    for (std::size_t a = 0; a < kNumAncilla; ++a) {
        first_pairs.push_back(ancilla_qubit(a));
        first_pairs.push_back(data_qubit(layout.supports[a].first));
        second_pairs.push_back(ancilla_qubit(a));
        second_pairs.push_back(data_qubit(layout.supports[a].second));
    }

    std::vector<Layer> layers;
    std::vector<MeasurementInfo> measurements;
    layers.push_back({LayerKind::PrepareData, 0, data, timings.prepare_ns});
    for (std::size_t r = 1; r <= rounds; ++r) {
        layers.push_back({LayerKind::AncillaBasisChange, r, ancillas, timings.basis_change_ns});
        layers.push_back({LayerKind::Entangle, r, first_pairs, timings.entangle_first_ns});
        layers.push_back({LayerKind::Entangle, r, second_pairs, timings.entangle_second_ns});
        layers.push_back({LayerKind::AncillaBasisChange, r, ancillas, timings.basis_change_ns});
        std::vector<std::uint8_t> measured = ancillas;
        if (r == rounds) {
            measured.insert(measured.end(), data.begin(), data.end());
        }
        for (auto q : measured) measurements.push_back({q, r});
        layers.push_back({LayerKind::Measure, r, std::move(measured), timings.measure_ns + timings.ring_down_ns});
    }
    return Circuit(layout, rounds, std::move(layers), std::move(measurements));
}

namespace {

void require_ancilla_bits(std::span<const std::uint8_t> measurements, std::size_t rounds) {
    if (rounds == 0) {
        throw std::invalid_argument("rounds must be >= 1");
    }
    if (measurements.size() < kNumAncilla * rounds) {
        throw std::invalid_argument("measurement record is missing ancilla outcomes: need " +
                                    std::to_string(kNumAncilla * rounds) + ", got " +
                                    std::to_string(measurements.size()));
    }
}

}  // namespace

std::vector<std::uint8_t> detector_values(std::span<const std::uint8_t> measurements, std::size_t rounds) {
    require_ancilla_bits(measurements, rounds);
    auto m = [&](std::size_t a, std::size_t r) -> std::uint8_t {
        return r == 0 ? 0 : measurements[Circuit::ancilla_measurement(a, r)] & 1;
    };
    std::vector<std::uint8_t> out;
    out.reserve(rounds < 2 ? 0 : kNumAncilla * (rounds - 1));
    for (std::size_t r = 2; r <= rounds; ++r) {
        for (std::size_t a = 0; a < kNumAncilla; ++a) {
            out.push_back(m(a, r) ^ m(a, r - 2));
        }
    }
    return out;
}

std::uint8_t observable_value(std::span<const std::uint8_t> measurements, std::size_t rounds) {
    require_ancilla_bits(measurements, rounds);
    std::uint8_t parity = 0;
    for (std::size_t a = 0; a < kNumAncilla; ++a) {
        parity ^= measurements[Circuit::ancilla_measurement(a, rounds)] & 1;
        if (rounds >= 2) parity ^= measurements[Circuit::ancilla_measurement(a, rounds - 1)] & 1;
    }
    return parity;
}

}  // namespace rtqec
