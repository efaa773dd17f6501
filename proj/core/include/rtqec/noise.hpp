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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rtqec/circuit.hpp"

namespace rtqec {

/// Circuit-level noise for superconducting devices:
///  - two-qubit depolarization with probability p after every CZ,
///  - single-qubit depolarization p/10 on idle qubits and after single-qubit
///    gates, preparation and measurement,
///  - classical measurement flip with probability p.
struct NoiseModel {
    double two_qubit = 0.03;
    double single_qubit = 0.003;
    double measurement_flip = 0.03;

    static NoiseModel from_p(double p);
    static NoiseModel noiseless() { return {0.0, 0.0, 0.0}; }

    /// Throws std::invalid_argument unless every probability is in [0, 1).
    void validate() const;
};

enum class ChannelKind : std::uint8_t { Depolarize1, Depolarize2, MeasurementFlip };

/// One noise location, applied right after layer `layer` executes.
struct NoiseChannel {
    ChannelKind kind;
    std::size_t layer;
    std::array<std::uint8_t, 2> qubits;  // second entry used by Depolarize2 only
    std::size_t measurement;             // record index for MeasurementFlip
    double probability;

    /// Number of non-identity Pauli terms (3, 15 or 1).
    std::size_t num_terms() const;
    /// Probability of each individual term under a uniform decomposition.
    double term_probability() const { return probability / static_cast<double>(num_terms()); }
};

/// Enumerates noise channels in execution order. Channels with zero probability are omitted.
std::vector<NoiseChannel> noise_channels(const Circuit& circuit, const NoiseModel& noise);

/// Pauli frame over the 8 qubits: bit q of `x`/`z` is the X/Z component on qubit q.
struct PauliFrame {
    std::uint8_t x = 0;
    std::uint8_t z = 0;

    void apply_h(std::uint8_t q) {
        std::uint8_t m = std::uint8_t(1u << q);
        std::uint8_t xs = x & m, zs = z & m;
        x = std::uint8_t((x & ~m) | zs);
        z = std::uint8_t((z & ~m) | xs);
    }
    void apply_cz(std::uint8_t a, std::uint8_t b) {
        if (x >> a & 1) z ^= std::uint8_t(1u << b);
        if (x >> b & 1) z ^= std::uint8_t(1u << a);
    }
    /// Pauli 0=I, 1=X, 2=Y, 3=Z.
    void apply_pauli(std::uint8_t q, std::uint8_t pauli) {
        if (pauli == 1 || pauli == 2) x ^= std::uint8_t(1u << q);
        if (pauli == 2 || pauli == 3) z ^= std::uint8_t(1u << q);
    }
    bool flips_measurement(std::uint8_t q) const { return x >> q & 1; }
};

/// Pauli term `term` (0-based over the non-identity terms) of `channel` applied to `frame`.
/// Depolarize2 terms enumerate (P0, P1) in base 4 skipping (I, I). MeasurementFlip has no frame effect.
void apply_channel_term(const NoiseChannel& channel, std::size_t term, PauliFrame& frame);

/// Applies the noiseless gates of one layer to a frame. Measurement layers do not touch the frame.
void apply_layer(const Layer& layer, PauliFrame& frame);

}  // namespace rtqec
