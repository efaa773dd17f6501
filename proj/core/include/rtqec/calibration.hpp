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
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "rtqec/graph.hpp"
#include "rtqec/sampler.hpp"

namespace rtqec {

class DegenerateDataError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Graph or shot lacks what a soft-weight overlay needs.
class ConfigurationError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

struct Posterior {
    double p1;  // P(outcome = 1 | z)
    std::uint8_t hard;
};

/// Linear discriminant with Gaussian class likelihoods and equal priors.
class Classifier {
   public:
    Classifier(Eigen::Vector2d mean0, Eigen::Vector2d mean1, Eigen::Matrix2d covariance);

    const Eigen::Vector2d& mean(int state) const { return state ? mean1_ : mean0_; }
    const Eigen::Matrix2d& covariance() const { return covariance_; }

    /// log P(z | 1) - log P(z | 0).
    double log_likelihood_ratio(const IQPoint& z) const;
    Posterior posterior(const IQPoint& z) const;
    /// w(z) = -log[P(z | 1 - ẑ) / P(z | ẑ)] with ẑ the argmax; always >= 0.
    double soft_weight(const IQPoint& z) const { return std::abs(log_likelihood_ratio(z)); }

    /// `{"mean0": [I, Q], "mean1": [I, Q], "covariance": [[..],[..]], "priors": [0.5, 0.5]}`
    std::string to_json() const;
    static Classifier from_json(const std::string& text);

   private:
    Eigen::Vector2d mean0_;
    Eigen::Vector2d mean1_;
    Eigen::Matrix2d covariance_;
    Eigen::Vector2d discriminant_;  // Σ^-1 (μ1 - μ0)
    double offset_;                 // discriminant · (μ0 + μ1) / 2
};

/// Sample means and pooled within-class covariance. Throws DegenerateDataError when a class
/// has fewer than two shots or the pooled covariance is singular.
Classifier train_classifier(std::span<const IQPoint> shots0, std::span<const IQPoint> shots1);

/// Readout points of `n` preparations of `state` under `iq`, shot i seeded by stream_seed(seed, i).
std::vector<IQPoint> draw_calibration_shots(const IQModel& iq, int state, std::size_t n, std::uint64_t seed);

/// Per-shot weights: classification-flip edges take the soft weight of their measurement.
/// Edges that also carry other mechanisms combine both by XOR. The graph is not modified.
/// Throws ConfigurationError if the shot has no soft values or the graph has no tagged edges.
std::vector<double> apply_soft_weights(const DecodingGraph& graph, const ShotRecord& shot,
                                       const Classifier& classifier);

enum class EstimateFlag : std::uint8_t { Ok = 0, Clamped = 1, Undefined = 2 };

struct PairwiseEstimate {
    struct PairEdge {
        std::uint32_t u, v;
        double probability;
        EstimateFlag flag;
    };
    std::size_t shots = 0;
    std::vector<PairEdge> edges;
    std::vector<double> boundary;  // per detector
    std::vector<EstimateFlag> boundary_flags;

    /// Estimated probability per edge of `graph` (same order as graph.edges()). Parallel edges
    /// between the same nodes share the estimate; it goes to the most probable of them.
    std::vector<double> edge_probabilities(const DecodingGraph& graph) const;
};

/// Streaming first- and second-moment accumulator over defect samples; shards merge exactly.
class PairwiseAccumulator {
   public:
    /// Candidate pairs are the distinct detector pairs that share an edge in `topology`.
    explicit PairwiseAccumulator(const DecodingGraph& topology);

    void add(std::span<const std::uint8_t> detectors);
    void merge(const PairwiseAccumulator& other);
    std::size_t shots() const { return shots_; }

    /// Throws std::invalid_argument for fewer than `min_shots` samples.
    PairwiseEstimate estimate(std::size_t min_shots = 10000) const;

   private:
    std::size_t num_detectors_;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs_;
    std::vector<std::vector<std::uint32_t>> incident_pairs_;
    std::vector<std::uint64_t> single_;
    std::vector<std::uint64_t> joint_;
    std::size_t shots_ = 0;
};

/// Convenience wrapper: one accumulator pass over `samples`.
PairwiseEstimate estimate_pairwise(std::span<const std::vector<std::uint8_t>> samples, const DecodingGraph& topology,
                                   std::size_t min_shots = 10000);

/// Syndromes drawn by flipping each edge independently with its probability.
std::vector<std::vector<std::uint8_t>> sample_graph_syndromes(const DecodingGraph& graph, std::size_t shots,
                                                              std::uint64_t seed);

}  // namespace rtqec
