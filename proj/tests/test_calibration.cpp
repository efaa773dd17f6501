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
#include <map>

#include "rtqec/calibration.hpp"
#include "rtqec/decoders.hpp"
#include "rtqec/rng.hpp"

using namespace rtqec;

namespace {

Classifier symmetric_classifier(double mu) {
    return Classifier(Eigen::Vector2d(-mu, 0), Eigen::Vector2d(mu, 0), Eigen::Matrix2d::Identity());
}

// A stability graph with probabilities spread over [0.005, 0.05].
DecodingGraph known_graph(std::size_t rounds, std::uint64_t seed) {
    DecodingGraph g = build_graph(build_stability8(rounds), NoiseModel::from_p(0.03));
    Rng rng(seed);
    std::uniform_real_distribution<double> pd(0.005, 0.05);
    std::vector<double> p(g.edges().size());
    for (auto& x : p) x = pd(rng);
    return g.with_probabilities(p);
}

// Truth per node pair and per boundary node, merging parallel edges.
struct MergedTruth {
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> pair;
    std::vector<double> boundary;
};

MergedTruth merged_truth(const DecodingGraph& g) {
    MergedTruth t;
    t.boundary.assign(g.num_detectors(), 0.0);
    for (const auto& e : g.edges()) {
        if (e.is_boundary()) {
            t.boundary[e.u] = xor_probability(t.boundary[e.u], e.probability);
        } else {
            auto& slot = t.pair[{e.u, e.v}];
            slot = xor_probability(slot, e.probability);
        }
    }
    return t;
}

DecodingGraph one_edge_per_pair(const DecodingGraph& g) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> best;
    for (std::size_t i = 0; i < g.edges().size(); ++i) {
        auto key = std::make_pair(g.edges()[i].u, g.edges()[i].v);
        auto it = best.find(key);
        if (it == best.end() || g.edges()[i].probability > g.edges()[it->second].probability) best[key] = i;
    }
    std::vector<double> p(g.edges().size(), 0.0);
    for (const auto& [key, i] : best) p[i] = g.edges()[i].probability;
    return g.with_probabilities(p);
}

double max_pair_error(const PairwiseEstimate& est, const MergedTruth& truth) {
    double worst = 0;
    for (const auto& e : est.edges) worst = std::max(worst, std::abs(e.probability - truth.pair.at({e.u, e.v})));
    return worst;
}

}  // namespace

TEST(classifier, recovers_generator_means) {
    IQModel iq = IQModel::from_assignment_error(0.07);
    const std::size_t n = 50000;
    auto s0 = draw_calibration_shots(iq, 0, n, 1);
    auto s1 = draw_calibration_shots(iq, 1, n, 2);
    Classifier c = train_classifier(s0, s1);
    double se = 1 / std::sqrt(double(n));
    for (int s = 0; s < 2; ++s) {
        for (int k = 0; k < 2; ++k) EXPECT_NEAR(c.mean(s)[k], iq.means[s][k], 3 * se);
    }
    EXPECT_NEAR(c.covariance()(0, 0), 1, 0.02);
    EXPECT_NEAR(c.covariance()(1, 1), 1, 0.02);
    EXPECT_NEAR(c.covariance()(0, 1), 0, 0.02);
}

TEST(classifier, trained_assignment_error_matches_design) {
    IQModel iq = IQModel::from_assignment_error(0.07);
    Classifier c = train_classifier(draw_calibration_shots(iq, 0, 50000, 11), draw_calibration_shots(iq, 1, 50000, 12));
    auto t0 = draw_calibration_shots(iq, 0, 50000, 13);
    auto t1 = draw_calibration_shots(iq, 1, 50000, 14);
    double wrong = 0;
    for (const auto& z : t0) wrong += c.posterior(z).hard == 1;
    for (const auto& z : t1) wrong += c.posterior(z).hard == 0;
    EXPECT_NEAR(wrong / 100000, 0.07, 0.005);
}

TEST(classifier, indistinguishable_classes_give_even_odds) {
    IQModel iq = IQModel::from_assignment_error(0.07);
    auto a = draw_calibration_shots(iq, 0, 50000, 21);
    auto b = draw_calibration_shots(iq, 0, 50000, 22);
    Classifier c = train_classifier(a, b);
    for (const auto& z : std::vector<IQPoint>{{-1.5f, 0.0f}, {0.0f, 0.0f}, {-2.5f, 1.0f}, {0.5f, -1.0f}}) {
        EXPECT_NEAR(c.posterior(z).p1, 0.5, 0.05);
    }
}

TEST(classifier, posterior_examples) {
    Classifier c = symmetric_classifier(1.3);
    EXPECT_DOUBLE_EQ(c.posterior({0.0f, 4.0f}).p1, 0.5);
    EXPECT_DOUBLE_EQ(c.soft_weight({0.0f, -2.0f}), 0.0);
    for (float i : {-2.0f, -0.25f, 0.5f, 1.75f}) {
        EXPECT_NEAR(c.log_likelihood_ratio({i, 0.7f}), 2 * 1.3 * i, 1e-5);
        auto post = c.posterior({i, 0.7f});
        EXPECT_EQ(post.hard, i > 0 ? 1 : 0);
        double p0 = c.posterior({-i, 0.7f}).p1;
        EXPECT_NEAR(post.p1 + p0, 1.0, 1e-12);
    }
    Classifier far = symmetric_classifier(5);
    EXPECT_GT(far.posterior({5.0f, 0.0f}).p1, 1 - 1e-9);
}

TEST(classifier, soft_weight_at_a_mean_with_ten_sigma_separation) {
    Classifier c = symmetric_classifier(5);
    EXPECT_NEAR(c.soft_weight({5.0f, 0.0f}), 50.0, 1e-9);
    EXPECT_NEAR(c.soft_weight({-5.0f, 0.0f}), 50.0, 1e-9);
    Classifier swapped(Eigen::Vector2d(5, 0), Eigen::Vector2d(-5, 0), Eigen::Matrix2d::Identity());
    Rng rng(4);
    std::normal_distribution<float> nd(0, 4);
    for (int k = 0; k < 100; ++k) {
        IQPoint z{nd(rng), nd(rng)};
        EXPECT_NEAR(c.soft_weight(z), swapped.soft_weight(z), 1e-9);
        EXPECT_GE(c.soft_weight(z), 0);
    }
    // Far in the tail the weight stays finite.
    EXPECT_TRUE(std::isfinite(c.soft_weight({1e6f, 0.0f})));
}

TEST(classifier, json_roundtrip) {
    Eigen::Matrix2d cov;
    cov << 1.5, 0.25, 0.25, 0.75;
    Classifier c(Eigen::Vector2d(0.1, -0.2), Eigen::Vector2d(1.25, 2.5), cov);
    Classifier d = Classifier::from_json(c.to_json());
    EXPECT_EQ(d.mean(0), c.mean(0));
    EXPECT_EQ(d.mean(1), c.mean(1));
    EXPECT_EQ(d.covariance(), c.covariance());
    EXPECT_NE(c.to_json().find("\"priors\""), std::string::npos);
    EXPECT_THROW(Classifier::from_json("{\"mean0\": [0]}"), std::invalid_argument);
    EXPECT_THROW(Classifier::from_json("not json"), std::invalid_argument);
}

TEST(classifier, degenerate_training_data) {
    std::vector<IQPoint> one = {{0.0f, 0.0f}};
    std::vector<IQPoint> pts = {{0.0f, 0.0f}, {1.0f, 1.0f}, {2.0f, 2.0f}};
    EXPECT_THROW(train_classifier(one, pts), DegenerateDataError);
    // Collinear points have a singular pooled covariance.
    EXPECT_THROW(train_classifier(pts, pts), DegenerateDataError);
    Eigen::Matrix2d singular;
    singular << 1, 1, 1, 1;
    EXPECT_THROW(Classifier(Eigen::Vector2d::Zero(), Eigen::Vector2d::Ones(), singular), DegenerateDataError);
}

TEST(soft_weights, configuration_errors) {
    DecodingGraph g = build_graph(build_stability8(4), NoiseModel::from_p(0.03));
    Classifier c = symmetric_classifier(1.5);
    ShotRecord hard = sample_shot(build_stability8(4), NoiseModel::from_p(0.03), 1);
    EXPECT_THROW(apply_soft_weights(g, hard, c), ConfigurationError);
    NoiseModel no_flip = NoiseModel::from_p(0.03);
    no_flip.measurement_flip = 0;
    DecodingGraph untagged = build_graph(build_stability8(4), no_flip);
    ShotRecord soft = sample_soft_shot(build_stability8(4), no_flip, IQModel::from_assignment_error(0.07), 1);
    EXPECT_THROW(apply_soft_weights(untagged, soft, c), ConfigurationError);
}

TEST(soft_weights, boundary_points_make_pure_measurement_edges_free) {
    Circuit circ = build_stability8(5);
    DecodingGraph g = build_graph(circ, NoiseModel::from_p(0.03));
    ShotRecord s = sample_shot(circ, NoiseModel::from_p(0.03), 5);
    s.soft.assign(s.measurements.size(), IQPoint{0.0f, 0.3f});
    auto w = apply_soft_weights(g, s, symmetric_classifier(1.5));
    std::size_t pure = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const Edge& e = g.edges()[i];
        if (e.measurement == kNoMeasurement) {
            EXPECT_EQ(w[i], e.weight);
        } else if (e.other_probability == 0) {
            EXPECT_EQ(w[i], 0.0);
            ++pure;
        } else {
            // Half-probability measurement flip XOR anything is still one half.
            EXPECT_NEAR(w[i], 0.0, 1e-12);
        }
    }
    EXPECT_GT(pure, 0u);
}

TEST(soft_weights, confident_readout_decodes_like_a_graph_without_readout_errors) {
    const std::size_t R = 6;
    Circuit circ = build_stability8(R);
    NoiseModel noise = NoiseModel::from_p(0.03);
    NoiseModel no_flip = noise;
    no_flip.measurement_flip = 0;
    DecodingGraph g = build_graph(circ, noise);
    MwpmDecoder soft_dec(g);
    MwpmDecoder clean_dec(build_graph(circ, no_flip));
    Classifier c = symmetric_classifier(40);
    auto shots = sample_batch(circ, no_flip, 500, 8);
    for (auto& s : shots) {
        s.soft.resize(s.measurements.size());
        for (std::size_t i = 0; i < s.measurements.size(); ++i) s.soft[i] = {s.measurements[i] ? 40.0f : -40.0f, 0.0f};
        auto w = apply_soft_weights(g, s, c);
        auto defects = s.defects();
        auto a = soft_dec.decode(defects, w);
        auto b = clean_dec.decode(defects);
        ASSERT_EQ(a.logical_flip, b.logical_flip);
        ASSERT_NEAR(a.total_weight, b.total_weight, 1e-6);
    }
}

TEST(soft_weights, soft_decoding_beats_hard_decoding_at_seven_percent) {
    const std::size_t R = 6, n = 20000;
    Circuit circ = build_stability8(R);
    IQModel iq = IQModel::from_assignment_error(0.07);
    NoiseModel gate = NoiseModel::from_p(0.03);
    NoiseModel hard_noise = gate;
    hard_noise.measurement_flip = 0.07;
    DecodingGraph g = build_graph(circ, hard_noise);
    MwpmDecoder dec(g);
    Classifier c(iq.means[0], iq.means[1], iq.covariance);
    auto shots = sample_batch(circ, gate, n, 31, 0, iq);
    double hard_err = 0, soft_err = 0;
    for (const auto& s : shots) {
        auto defects = s.defects();
        hard_err += dec.decode(defects).logical_flip != s.observable_flip_truth;
        soft_err += dec.decode(defects, apply_soft_weights(g, s, c)).logical_flip != s.observable_flip_truth;
    }
    EXPECT_LT(soft_err, hard_err);
}

TEST(pairwise, recovers_known_graph) {
    DecodingGraph g = known_graph(5, 3);
    auto truth = merged_truth(g);
    auto samples = sample_graph_syndromes(g, 200000, 77);
    auto est = estimate_pairwise(samples, g);
    EXPECT_EQ(est.shots, 200000u);
    EXPECT_EQ(est.edges.size(), truth.pair.size());
    for (const auto& e : est.edges) {
        EXPECT_EQ(e.flag, EstimateFlag::Ok);
        EXPECT_NEAR(e.probability, truth.pair.at({e.u, e.v}), 0.003) << e.u << "-" << e.v;
    }
    for (std::size_t i = 0; i < g.num_detectors(); ++i) EXPECT_NEAR(est.boundary[i], truth.boundary[i], 0.006) << i;
}

TEST(pairwise, error_shrinks_with_more_shots) {
    DecodingGraph g = known_graph(4, 9);
    auto truth = merged_truth(g);
    auto samples = sample_graph_syndromes(g, 1000000, 5);
    std::vector<double> worst;
    for (std::size_t n : {10000u, 100000u, 1000000u}) {
        std::span<const std::vector<std::uint8_t>> prefix(samples.data(), n);
        worst.push_back(max_pair_error(estimate_pairwise(prefix, g), truth));
    }
    EXPECT_GT(worst[0], 2 * worst[1]);
    EXPECT_GT(worst[1], 2 * worst[2]);
    EXPECT_LT(worst[2], 0.002);
}

TEST(pairwise, independent_detectors_show_no_edges) {
    std::vector<Fault> faults;
    for (std::uint32_t i = 0; i < 5; ++i) faults.push_back(Fault{0, i, 0, ChannelKind::Depolarize1, 0.1, {i}, false});
    for (std::uint32_t i = 0; i + 1 < 5; ++i) {
        faults.push_back(Fault{0, 10 + i, 0, ChannelKind::Depolarize1, 0.01, {i, i + 1}, false});
    }
    DecodingGraph topology = build_graph(faults, 5);
    std::vector<double> p(topology.edges().size());
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = topology.edges()[k].is_boundary() ? 0.1 : 0.0;
    const std::size_t n = 100000;
    auto samples = sample_graph_syndromes(topology.with_probabilities(p), n, 3);
    auto est = estimate_pairwise(samples, topology);
    for (const auto& e : est.edges) {
        // Standard error of a covariance-based estimate near zero, for q = 0.1 marginals.
        double se = 0.1 * 0.9 / std::sqrt(double(n)) / (1 - 2 * 0.1);
        EXPECT_LE(e.probability, 3 * se);
        EXPECT_NE(e.flag, EstimateFlag::Undefined);
    }
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(est.boundary[i], 0.1, 0.005);
}

TEST(pairwise, single_boundary_node) {
    std::vector<Fault> faults = {Fault{0, 0, 0, ChannelKind::Depolarize1, 0.05, {0}, false}};
    DecodingGraph g = build_graph(faults, 1);
    auto samples = sample_graph_syndromes(g, 100000, 12);
    auto est = estimate_pairwise(samples, g);
    EXPECT_TRUE(est.edges.empty());
    EXPECT_NEAR(est.boundary[0], 0.05, 3 * std::sqrt(0.05 * 0.95 / 100000));
    auto probs = est.edge_probabilities(g);
    ASSERT_EQ(probs.size(), 1u);
    EXPECT_EQ(probs[0], est.boundary[0]);
}

TEST(pairwise, clamped_and_undefined_flags) {
    std::vector<Fault> faults = {Fault{0, 0, 0, ChannelKind::Depolarize1, 0.1, {0, 1}, false},
                                 Fault{0, 1, 0, ChannelKind::Depolarize1, 0.1, {2, 3}, false}};
    DecodingGraph topology = build_graph(faults, 4);
    std::vector<std::vector<std::uint8_t>> samples;
    // Detectors 0/1: P(both) = .25, P(0 only) = .35, P(1 only) = .05 -> negative discriminant.
    // Detectors 2/3: independent fair coins -> vanishing denominator.
    for (std::size_t s = 0; s < 20000; ++s) {
        std::size_t k = s % 20;
        std::uint8_t x0 = k < 12, x1 = k < 5 || (k >= 12 && k < 13);
        std::uint8_t x2 = s & 1, x3 = (s >> 1) & 1;
        samples.push_back({x0, x1, x2, x3});
    }
    auto est = estimate_pairwise(samples, topology);
    ASSERT_EQ(est.edges.size(), 2u);
    EXPECT_EQ(est.edges[0].flag, EstimateFlag::Clamped);
    EXPECT_EQ(est.edges[0].probability, 0.0);
    EXPECT_EQ(est.edges[1].flag, EstimateFlag::Undefined);
}

TEST(pairwise, minimum_shot_count) {
    DecodingGraph g = known_graph(3, 1);
    auto samples = sample_graph_syndromes(g, 9999, 1);
    EXPECT_THROW(estimate_pairwise(samples, g), std::invalid_argument);
    EXPECT_NO_THROW(estimate_pairwise(samples, g, 1000));
}

TEST(pairwise, sharded_accumulators_merge_exactly) {
    DecodingGraph g = known_graph(4, 2);
    auto samples = sample_graph_syndromes(g, 30000, 6);
    PairwiseAccumulator whole(g), left(g), right(g);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        whole.add(samples[i]);
        (i % 3 ? left : right).add(samples[i]);
    }
    left.merge(right);
    EXPECT_EQ(left.shots(), whole.shots());
    auto a = whole.estimate(), b = left.estimate();
    ASSERT_EQ(a.edges.size(), b.edges.size());
    for (std::size_t k = 0; k < a.edges.size(); ++k) EXPECT_EQ(a.edges[k].probability, b.edges[k].probability);
    EXPECT_EQ(a.boundary, b.boundary);
}

TEST(pairwise, estimated_weights_decode_as_well_as_true_weights) {
    const std::size_t n = 100000;
    // Two-point statistics cannot split parallel edges that differ only in the observable
    // flag, so the generator keeps one edge per node pair.
    DecodingGraph g = one_edge_per_pair(known_graph(4, 17));
    auto est = estimate_pairwise(sample_graph_syndromes(g, 1000000, 1), g);
    DecodingGraph fitted = g.with_probabilities(est.edge_probabilities(g));
    MwpmDecoder truth_dec(g), fitted_dec(fitted);
    // Edge-flip shots that also track the observable.
    Rng rng(99);
    double err_true = 0, err_fit = 0;
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<std::uint8_t> det(g.num_detectors(), 0);
        std::uint8_t obs = 0;
        for (const auto& e : g.edges()) {
            if (uniform01(rng) >= e.probability) continue;
            det[e.u] ^= 1;
            if (!e.is_boundary()) det[e.v] ^= 1;
            obs ^= e.flips_observable;
        }
        std::vector<std::uint32_t> defects;
        for (std::uint32_t i = 0; i < det.size(); ++i) {
            if (det[i]) defects.push_back(i);
        }
        err_true += truth_dec.decode(defects).logical_flip != obs;
        err_fit += fitted_dec.decode(defects).logical_flip != obs;
    }
    double rate = err_true / n;
    double se = std::sqrt(rate * (1 - rate) / n);
    EXPECT_LE(std::abs(err_fit - err_true) / n, se);
}
