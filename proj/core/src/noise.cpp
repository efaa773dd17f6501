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

#include "rtqec/noise.hpp"

#include <stdexcept>

namespace rtqec {

NoiseModel NoiseModel::from_p(double p) {
    NoiseModel n{p, p / 10, p};
    n.validate();
    return n;
}

void NoiseModel::validate() const {
    auto ok = [](double v) { return v >= 0 && v < 1; };
    if (!ok(two_qubit) || !ok(single_qubit) || !ok(measurement_flip)) {
        throw std::invalid_argument("noise probabilities must lie in [0, 1)");
    }
}

std::size_t NoiseChannel::num_terms() const {
    switch (kind) {
        case ChannelKind::Depolarize1:
            return 3;
        case ChannelKind::Depolarize2:
            return 15;
        case ChannelKind::MeasurementFlip:
            return 1;
    }
    return 1;
}

std::vector<NoiseChannel> noise_channels(const Circuit& circuit, const NoiseModel& noise) {
    noise.validate();
    std::vector<NoiseChannel> out;
    auto add1 = [&](std::size_t layer, std::uint8_t q) {
        if (noise.single_qubit > 0) out.push_back({ChannelKind::Depolarize1, layer, {q, 0}, 0, noise.single_qubit});
    };

    std::size_t measurement_cursor = 0;
    const auto& layers = circuit.layers();
    for (std::size_t li = 0; li < layers.size(); ++li) {
        const Layer& layer = layers[li];
        std::uint8_t busy = 0;
        switch (layer.kind) {
            case LayerKind::PrepareData:
            case LayerKind::AncillaBasisChange:
                for (auto q : layer.qubits) {
                    busy |= std::uint8_t(1u << q);
                    add1(li, q);
                }
                break;
            case LayerKind::Entangle:
                for (std::size_t i = 0; i + 1 < layer.qubits.size(); i += 2) {
                    std::uint8_t a = layer.qubits[i], b = layer.qubits[i + 1];
                    busy |= std::uint8_t((1u << a) | (1u << b));
                    if (noise.two_qubit > 0) {
                        out.push_back({ChannelKind::Depolarize2, li, {a, b}, 0, noise.two_qubit});
                    }
                }
                break;
            case LayerKind::Measure:
                for (auto q : layer.qubits) {
                    busy |= std::uint8_t(1u << q);
                    if (noise.measurement_flip > 0) {
                        out.push_back({ChannelKind::MeasurementFlip, li, {q, 0}, measurement_cursor, noise.measurement_flip});
                    }
                    ++measurement_cursor;
                    add1(li, q);
                }
                break;
        }
        for (std::uint8_t q = 0; q < kNumQubits; ++q) {
            if (!(busy >> q & 1)) add1(li, q);
        }
    }
    return out;
}

void apply_channel_term(const NoiseChannel& channel, std::size_t term, PauliFrame& frame) {
    switch (channel.kind) {
        case ChannelKind::Depolarize1:
            frame.apply_pauli(channel.qubits[0], std::uint8_t(term + 1));
            break;
        case ChannelKind::Depolarize2: {
            std::size_t code = term + 1;
            frame.apply_pauli(channel.qubits[0], std::uint8_t(code / 4));
            frame.apply_pauli(channel.qubits[1], std::uint8_t(code % 4));
            break;
        }
        case ChannelKind::MeasurementFlip:
            break;
    }
}

void apply_layer(const Layer& layer, PauliFrame& frame) {
    switch (layer.kind) {
        case LayerKind::PrepareData:
        case LayerKind::AncillaBasisChange:
            for (auto q : layer.qubits) frame.apply_h(q);
            break;
        case LayerKind::Entangle:
            for (std::size_t i = 0; i + 1 < layer.qubits.size(); i += 2) {
                frame.apply_cz(layer.qubits[i], layer.qubits[i + 1]);
            }
            break;
        case LayerKind::Measure:
            break;
    }
}

}  // namespace rtqec
