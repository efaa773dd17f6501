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
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rtqec {

/// Qubits are indexed 0..3 (data) and 4..7 (ancilla) throughout the library.
inline constexpr std::size_t kNumData = 4;
inline constexpr std::size_t kNumAncilla = 4;
inline constexpr std::size_t kNumQubits = kNumData + kNumAncilla;

inline constexpr std::uint8_t data_qubit(std::size_t i) { return static_cast<std::uint8_t>(i); }
inline constexpr std::uint8_t ancilla_qubit(std::size_t a) { return static_cast<std::uint8_t>(kNumData + a); }

/// Ring of 8 qubits. Ancilla `a` measures Z⊗Z on its two supporting data qubits;
/// every data qubit is in exactly two supports so the product of all four
/// stabilizers is the identity.
struct QubitLayout {
    std::array<int, kNumData> data_labels;
    std::array<int, kNumAncilla> ancilla_labels;
    std::array<std::pair<std::size_t, std::size_t>, kNumAncilla> supports;

    /// Hardware labels of the 8-qubit sublattice; ancillas 36, 38, 52, 50 walk the ring.
    static QubitLayout ring8();

    /// Throws std::invalid_argument when the ring invariants do not hold.
    void validate() const;
};

enum class LayerKind : std::uint8_t {
    PrepareData,         // data qubits into the X basis (first layer only)
    AncillaBasisChange,  // Hadamard on every ancilla
    Entangle,            // one sub-layer of disjoint CZ gates
    Measure,             // Z-basis measurement of the listed qubits
};

const char* to_string(LayerKind kind);

struct Layer {
    LayerKind kind;
    /// 1-based round this layer belongs to; 0 for the preparation layer.
    std::size_t round;
    /// Targets. For Entangle layers consecutive entries form (ancilla, data) pairs.
    std::vector<std::uint8_t> qubits;
    double duration_ns;
};

struct MeasurementInfo {
    std::uint8_t qubit;
    std::size_t round;
};

/// Node of the decoding graph: the comparison of ancilla `ancilla` at `round` (2..R).
struct DetectorIndex {
    std::size_t ancilla;
    std::size_t round;

    /// Dense node id, ordered by (round, ancilla).
    std::size_t node() const { return (round - 2) * kNumAncilla + ancilla; }
    static DetectorIndex from_node(std::size_t node) { return {node % kNumAncilla, node / kNumAncilla + 2}; }
    bool operator==(const DetectorIndex&) const = default;
};

/// Layer timings (ns) of one syndrome extraction round.
struct LayerTimings {
    double prepare_ns = 40;
    double basis_change_ns = 40;
    double entangle_first_ns = 176;
    double entangle_second_ns = 112;
    double measure_ns = 948;
    double ring_down_ns = 336;

    double round_ns() const {
        return 2 * basis_change_ns + entangle_first_ns + entangle_second_ns + measure_ns + ring_down_ns;
    }
};

/// Immutable stability-experiment circuit. Ancillas are never reset between rounds.
class Circuit {
   public:
    Circuit(QubitLayout layout, std::size_t rounds, std::vector<Layer> layers, std::vector<MeasurementInfo> measurements);

    const QubitLayout& layout() const { return layout_; }
    std::size_t rounds() const { return rounds_; }
    const std::vector<Layer>& layers() const { return layers_; }
    const std::vector<MeasurementInfo>& measurements() const { return measurements_; }

    std::size_t num_measurements() const { return measurements_.size(); }
    std::size_t num_detectors() const { return rounds_ < 2 ? 0 : kNumAncilla * (rounds_ - 1); }

    /// Record index of ancilla `a`'s measurement in round `r` (1-based).
    static std::size_t ancilla_measurement(std::size_t a, std::size_t r) { return (r - 1) * kNumAncilla + a; }

    double duration_ns() const;

    /// One layer per line: `<kind> <round> <q,q,...> <duration_ns>`.
    void write_text(std::ostream& out) const;
    std::string to_text() const;

   private:
    QubitLayout layout_;
    std::size_t rounds_;
    std::vector<Layer> layers_;
    std::vector<MeasurementInfo> measurements_;
};

/// CZ-based ZZ extraction: data in |+>, then per round H(anc), CZ, CZ, H(anc), M(anc).
/// The final round also measures the data qubits. Throws std::invalid_argument for rounds == 0.
Circuit build_stability8(std::size_t rounds, const QubitLayout& layout = QubitLayout::ring8(),
                         const LayerTimings& timings = {});

/// Detector bits d_{a,r} = m_{a,r} ^ m_{a,r-2} (m_{a,0} = 0) for r = 2..R, in node order.
/// `measurements` holds at least the 4·R ancilla bits in record order.
std::vector<std::uint8_t> detector_values(std::span<const std::uint8_t> measurements, std::size_t rounds);

/// XOR over ancillas of the final-round stabilizer value m_{a,R} ^ m_{a,R-1}.
std::uint8_t observable_value(std::span<const std::uint8_t> measurements, std::size_t rounds);

}  // namespace rtqec
