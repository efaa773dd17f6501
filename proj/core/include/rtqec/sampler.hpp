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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rtqec/circuit.hpp"
#include "rtqec/noise.hpp"

namespace rtqec {

using IQPoint = std::array<float, 2>;

struct ShotRecord {
    std::vector<std::uint8_t> measurements;
    std::vector<IQPoint> soft;  // empty unless sampled in soft mode
    std::vector<std::uint8_t> detectors;
    std::uint8_t observable_flip_truth = 0;

    bool has_soft() const { return !soft.empty(); }
    std::vector<std::uint32_t> defects() const;
};

/// Two Gaussian readout blobs with a shared covariance.
struct IQModel {
    std::array<Eigen::Vector2d, 2> means;
    Eigen::Matrix2d covariance = Eigen::Matrix2d::Identity();

    /// Means at (±s/2, 0) with unit covariance so that the assignment error is `error`.
    static IQModel from_assignment_error(double error);
    /// Misclassification probability of the Bayes (equal prior) discriminant.
    double assignment_error() const;

    /// Throws std::invalid_argument for a non positive-definite covariance.
    void validate() const;
    /// Equal-prior linear discriminant of this model.
    std::uint8_t hard_bit(const IQPoint& z) const;
};

/// Noiseless reference: first-round collapse bits per ancilla (the fourth is the XOR of the
/// other three) and the final data-measurement bits consistent with them.
struct ReferenceOutcomes {
    std::array<std::uint8_t, kNumAncilla> collapse{};
    std::array<std::uint8_t, kNumData> final_data{};

    static ReferenceOutcomes draw(const Circuit& circuit, std::uint64_t seed);
    std::uint8_t measurement(const Circuit& circuit, std::size_t record) const;
};

/// Monte Carlo Pauli-frame sample of one shot. Deterministic in `seed`.
ShotRecord sample_shot(const Circuit& circuit, const NoiseModel& noise, std::uint64_t seed);

/// Soft-readout shot: every measurement draws z from the blob of the physical outcome and
/// records the discriminant's decision. The classification-flip channel is disabled.
ShotRecord sample_soft_shot(const Circuit& circuit, const NoiseModel& noise, const IQModel& iq, std::uint64_t seed);

/// Shot `i` of a batch uses stream_seed(seed, i), so batches are independent of `threads`.
std::vector<ShotRecord> sample_batch(const Circuit& circuit, const NoiseModel& noise, std::size_t shots,
                                     std::uint64_t seed, std::size_t threads = 1,
                                     const std::optional<IQModel>& iq = std::nullopt);

struct InjectedFault {
    std::size_t channel;  // index into the channel list
    std::size_t term;
};

/// Noise-free execution with exactly the listed Pauli terms applied. `seed` only picks the
/// reference collapse.
ShotRecord simulate_with_faults(const Circuit& circuit, std::span<const NoiseChannel> channels,
                                std::span<const InjectedFault> faults, std::uint64_t seed);

// Serialization.

/// Bits packed four per hex digit, bit 4k being the low bit of digit k.
std::string bits_to_hex(std::span<const std::uint8_t> bits);
std::vector<std::uint8_t> hex_to_bits(const std::string& hex, std::size_t num_bits);

/// `shot_id,measurements,detectors,truth` rows after a comment header carrying the sizes.
void write_shots_csv(std::ostream& out, std::span<const ShotRecord> shots, const std::string& provenance = {});
std::vector<ShotRecord> read_shots_csv(std::istream& in);

/// Little-endian float32 I then Q for each measurement of each shot.
void write_soft_sidecar(std::ostream& out, std::span<const ShotRecord> shots);
/// Attaches sidecar values to `shots` (which fixes the per-shot measurement count).
void read_soft_sidecar(std::istream& in, std::span<ShotRecord> shots);

void write_iq_points(std::ostream& out, std::span<const IQPoint> points);
std::vector<IQPoint> read_iq_points(std::istream& in);

}  // namespace rtqec
