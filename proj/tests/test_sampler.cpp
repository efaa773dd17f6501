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
#include <cstring>
#include <map>
#include <sstream>

#include "rtqec/graph.hpp"
#include "rtqec/sampler.hpp"

using namespace rtqec;

namespace {

// Per-detector flip probability of each noise channel. Terms of one channel are
// mutually exclusive, so their contributions add.
std::vector<double> analytic_defect_rates(const Circuit& c, const NoiseModel& noise) {
    auto faults = enumerate_faults(c, noise);
    std::map<std::pair<std::size_t, std::size_t>, double> per_channel;  // (channel, detector) -> q
    for (const auto& f : faults) {
        for (auto d : f.defects) per_channel[{f.channel, d}] += f.probability;
    }
    std::vector<double> keep(c.num_detectors(), 1.0);
    for (const auto& [key, q] : per_channel) keep[key.second] *= 1 - 2 * q;
    std::vector<double> rates(keep.size());
    for (std::size_t d = 0; d < keep.size(); ++d) rates[d] = 0.5 * (1 - keep[d]);
    return rates;
}

bool same_shot(const ShotRecord& a, const ShotRecord& b) {
    return a.measurements == b.measurements && a.detectors == b.detectors &&
           a.observable_flip_truth == b.observable_flip_truth && a.soft == b.soft;
}

}  // namespace

TEST(sampler, same_seed_same_shot) {
    Circuit c = build_stability8(6);
    NoiseModel n = NoiseModel::from_p(0.03);
    for (std::uint64_t seed : {0ull, 1ull, 0xdeadbeefull}) {
        EXPECT_TRUE(same_shot(sample_shot(c, n, seed), sample_shot(c, n, seed)));
    }
    EXPECT_FALSE(same_shot(sample_shot(c, n, 1), sample_shot(c, n, 2)));
}

TEST(sampler, batches_do_not_depend_on_thread_count) {
    Circuit c = build_stability8(5);
    NoiseModel n = NoiseModel::from_p(0.03);
    auto one = sample_batch(c, n, 999, 17, 1);
    auto four = sample_batch(c, n, 999, 17, 4);
    ASSERT_EQ(one.size(), four.size());
    for (std::size_t i = 0; i < one.size(); ++i) ASSERT_TRUE(same_shot(one[i], four[i])) << i;
    IQModel iq = IQModel::from_assignment_error(0.07);
    auto s1 = sample_batch(c, n, 300, 5, 1, iq);
    auto s3 = sample_batch(c, n, 300, 5, 3, iq);
    for (std::size_t i = 0; i < s1.size(); ++i) ASSERT_TRUE(same_shot(s1[i], s3[i])) << i;
}

TEST(sampler, detectors_and_truth_follow_from_measurements) {
    Circuit c = build_stability8(7);
    auto shots = sample_batch(c, NoiseModel::from_p(0.05), 2000, 3);
    for (const auto& s : shots) {
        ASSERT_EQ(s.measurements.size(), c.num_measurements());
        ASSERT_EQ(s.detectors, detector_values(s.measurements, 7));
        ASSERT_EQ(s.observable_flip_truth, observable_value(s.measurements, 7));
        auto defects = s.defects();
        ASSERT_EQ(defects.size(), static_cast<std::size_t>(std::count(s.detectors.begin(), s.detectors.end(), 1)));
    }
}

TEST(sampler, noiseless_shots_are_trivial_for_every_seed) {
    Circuit c = build_stability8(8);
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        ShotRecord s = sample_shot(c, NoiseModel::noiseless(), seed);
        ASSERT_EQ(std::count(s.detectors.begin(), s.detectors.end(), 1), 0);
        ASSERT_EQ(s.observable_flip_truth, 0);
    }
}

TEST(sampler, bulk_defect_rates_match_channel_analytics) {
    const std::size_t R = 8, shots = 100000;
    Circuit c = build_stability8(R);
    NoiseModel n = NoiseModel::from_p(0.03);
    auto expect = analytic_defect_rates(c, n);
    auto batch = sample_batch(c, n, shots, 2024, 0);
    std::vector<double> counts(c.num_detectors(), 0);
    for (const auto& s : batch) {
        for (std::size_t d = 0; d < counts.size(); ++d) counts[d] += s.detectors[d];
    }
    for (std::size_t d = 0; d < counts.size(); ++d) {
        double rate = counts[d] / shots;
        double se = std::sqrt(expect[d] * (1 - expect[d]) / shots);
        auto idx = DetectorIndex::from_node(d);
        if (idx.round >= 3 && idx.round + 2 <= R) {
            EXPECT_NEAR(rate, expect[d], 3 * se) << "detector " << d;
        } else {
            EXPECT_NEAR(rate, expect[d], 5 * se) << "detector " << d;
        }
    }
}

TEST(sampler, forced_measurement_flip_matches_enumeration) {
    Circuit c = build_stability8(6);
    NoiseModel n = NoiseModel::from_p(0.03);
    auto channels = noise_channels(c, n);
    for (std::size_t i = 0; i < channels.size(); ++i) {
        if (channels[i].kind != ChannelKind::MeasurementFlip) continue;
        InjectedFault f{i, 0};
        ShotRecord s = simulate_with_faults(c, channels, std::span<const InjectedFault>(&f, 1), i);
        std::vector<std::uint8_t> clean(c.num_measurements(), 0);
        clean[channels[i].measurement] = 1;
        EXPECT_EQ(s.detectors, detector_values(clean, 6));
        EXPECT_EQ(s.observable_flip_truth, observable_value(clean, 6));
    }
}

TEST(iq_model, assignment_error_from_overlap) {
    EXPECT_NEAR(IQModel::from_assignment_error(0.07).assignment_error(), 0.07, 1e-12);
    IQModel m = IQModel::from_assignment_error(0.07);
    EXPECT_NEAR(m.means[1][0] - m.means[0][0], 2 * 1.4757910281791706, 1e-12);
    IQModel same = m;
    same.means[1] = same.means[0];
    EXPECT_DOUBLE_EQ(same.assignment_error(), 0.5);
    EXPECT_THROW(IQModel::from_assignment_error(0.5), std::invalid_argument);
    EXPECT_THROW(IQModel::from_assignment_error(0.0), std::invalid_argument);
}

TEST(iq_model, degenerate_covariance_rejected) {
    IQModel m = IQModel::from_assignment_error(0.1);
    m.covariance << 1, 1, 1, 1;
    EXPECT_THROW(m.validate(), std::invalid_argument);
    EXPECT_THROW(sample_soft_shot(build_stability8(3), NoiseModel::from_p(0.01), m, 1), std::invalid_argument);
}

TEST(soft_sampler, measured_assignment_error_is_seven_percent) {
    // Without gate noise the round-2 detector equals the round-2 ancilla readout error.
    Circuit c = build_stability8(2);
    IQModel iq = IQModel::from_assignment_error(0.07);
    auto shots = sample_batch(c, NoiseModel::noiseless(), 25000, 77, 0, iq);
    double errors = 0, draws = 0;
    for (const auto& s : shots) {
        ASSERT_TRUE(s.has_soft());
        ASSERT_EQ(s.soft.size(), s.measurements.size());
        for (std::size_t i = 0; i < s.measurements.size(); ++i) ASSERT_EQ(s.measurements[i], iq.hard_bit(s.soft[i]));
        for (auto d : s.detectors) errors += d;
        draws += s.detectors.size();
    }
    EXPECT_EQ(draws, 100000);
    EXPECT_NEAR(errors / draws, 0.07, 0.005);
}

TEST(soft_sampler, separable_blobs_match_hard_sampling_without_flips) {
    Circuit c = build_stability8(5);
    IQModel iq = IQModel::from_assignment_error(0.07);
    iq.means[0] = Eigen::Vector2d(-5, 0);
    iq.means[1] = Eigen::Vector2d(5, 0);
    NoiseModel n = NoiseModel::from_p(0.03);
    NoiseModel no_flip = n;
    no_flip.measurement_flip = 0;
    const std::size_t shots = 40000;
    auto soft = sample_batch(c, n, shots, 8, 0, iq);
    auto hard = sample_batch(c, no_flip, shots, 9, 0);
    double soft_rate = 0, hard_rate = 0;
    for (std::size_t i = 0; i < shots; ++i) {
        soft_rate += std::count(soft[i].detectors.begin(), soft[i].detectors.end(), 1);
        hard_rate += std::count(hard[i].detectors.begin(), hard[i].detectors.end(), 1);
    }
    double denom = double(shots) * c.num_detectors();
    soft_rate /= denom;
    hard_rate /= denom;
    double se = std::sqrt(2 * hard_rate * (1 - hard_rate) / denom);
    EXPECT_NEAR(soft_rate, hard_rate, 5 * se);
    auto expect = analytic_defect_rates(c, no_flip);
    double mean_expect = 0;
    for (double r : expect) mean_expect += r / expect.size();
    EXPECT_NEAR(soft_rate, mean_expect, 5 * se);
}

TEST(serialization, hex_roundtrip_and_bit_order) {
    std::vector<std::uint8_t> bits = {1, 0, 0, 0, 0, 1, 0, 1, 1};
    EXPECT_EQ(bits_to_hex(bits), "1a1");
    EXPECT_EQ(hex_to_bits("1a1", bits.size()), bits);
    EXPECT_EQ(bits_to_hex(std::vector<std::uint8_t>{}), "");
    EXPECT_ANY_THROW(hex_to_bits("zz", 8));
}

TEST(serialization, shots_csv_roundtrip) {
    Circuit c = build_stability8(4);
    auto shots = sample_batch(c, NoiseModel::from_p(0.05), 50, 11);
    std::stringstream ss;
    write_shots_csv(ss, shots, "rtqec test");
    std::string text = ss.str();
    EXPECT_EQ(text.rfind("# rtqec test\n", 0), 0u);
    auto back = read_shots_csv(ss);
    ASSERT_EQ(back.size(), shots.size());
    for (std::size_t i = 0; i < shots.size(); ++i) EXPECT_TRUE(same_shot(back[i], shots[i])) << i;
    std::stringstream bad("shot_id,measurements,detectors,truth\n0,0,0,0\n");
    EXPECT_THROW(read_shots_csv(bad), std::invalid_argument);
}

TEST(serialization, soft_sidecar_roundtrip) {
    Circuit c = build_stability8(3);
    auto shots = sample_batch(c, NoiseModel::from_p(0.02), 20, 4, 1, IQModel::from_assignment_error(0.07));
    std::stringstream bin(std::ios::in | std::ios::out | std::ios::binary);
    write_soft_sidecar(bin, shots);
    EXPECT_EQ(bin.str().size(), 20 * c.num_measurements() * 8);
    EXPECT_EQ(static_cast<unsigned char>(bin.str()[0]), [&] {
        float f = shots[0].soft[0][0];
        unsigned char b[4];
        std::memcpy(b, &f, 4);
        return b[0];
    }());
    std::vector<ShotRecord> plain(shots.size());
    for (std::size_t i = 0; i < shots.size(); ++i) {
        plain[i] = shots[i];
        plain[i].soft.clear();
    }
    read_soft_sidecar(bin, plain);
    for (std::size_t i = 0; i < shots.size(); ++i) EXPECT_EQ(plain[i].soft, shots[i].soft);
}

TEST(serialization, iq_points_roundtrip) {
    std::vector<IQPoint> pts = {{0.5f, -1.25f}, {3.0f, 1e-7f}, {-2.0f, 0.0f}};
    std::stringstream ss;
    write_iq_points(ss, pts);
    EXPECT_EQ(read_iq_points(ss), pts);
}
