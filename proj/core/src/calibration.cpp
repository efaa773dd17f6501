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

#include "rtqec/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include "json.hpp"

#include "rtqec/rng.hpp"

namespace rtqec {

Classifier::Classifier(Eigen::Vector2d mean0, Eigen::Vector2d mean1, Eigen::Matrix2d covariance)
    : mean0_(std::move(mean0)), mean1_(std::move(mean1)), covariance_(std::move(covariance)) {
    double det = covariance_.determinant();
    if (!covariance_.allFinite() || !(det > 1e-300) || covariance_(0, 0) <= 0) {
        throw DegenerateDataError("classifier covariance is singular or not positive definite");
    }
    discriminant_ = covariance_.inverse() * (mean1_ - mean0_);
    offset_ = discriminant_.dot((mean0_ + mean1_) / 2);
}

double Classifier::log_likelihood_ratio(const IQPoint& z) const {
    return discriminant_[0] * z[0] + discriminant_[1] * z[1] - offset_;
}

Posterior Classifier::posterior(const IQPoint& z) const {
    double llr = log_likelihood_ratio(z);
    double p1 = llr >= 0 ? 1 / (1 + std::exp(-llr)) : std::exp(llr) / (1 + std::exp(llr));
    return {p1, static_cast<std::uint8_t>(llr > 0 ? 1 : 0)};
}

std::string Classifier::to_json() const {
    nlohmann::json j;
    j["mean0"] = {mean0_[0], mean0_[1]};
    j["mean1"] = {mean1_[0], mean1_[1]};
    j["covariance"] = {{covariance_(0, 0), covariance_(0, 1)}, {covariance_(1, 0), covariance_(1, 1)}};
    j["priors"] = {0.5, 0.5};
    return j.dump(2);
}

Classifier Classifier::from_json(const std::string& text) {
    try {
        auto j = nlohmann::json::parse(text);
        Eigen::Vector2d m0(j.at("mean0").at(0).get<double>(), j.at("mean0").at(1).get<double>());
        Eigen::Vector2d m1(j.at("mean1").at(0).get<double>(), j.at("mean1").at(1).get<double>());
        Eigen::Matrix2d cov;
        for (int r = 0; r < 2; ++r) {
            for (int c = 0; c < 2; ++c) cov(r, c) = j.at("covariance").at(r).at(c).get<double>();
        }
        return Classifier(m0, m1, cov);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("classifier JSON: ") + e.what());
    }
}

Classifier train_classifier(std::span<const IQPoint> shots0, std::span<const IQPoint> shots1) {
    if (shots0.size() < 2 || shots1.size() < 2) {
        throw DegenerateDataError("train_classifier needs at least two shots per class");
    }
    auto mean_of = [](std::span<const IQPoint> shots) {
        Eigen::Vector2d m = Eigen::Vector2d::Zero();
        for (const auto& z : shots) m += Eigen::Vector2d(z[0], z[1]);
        return Eigen::Vector2d(m / static_cast<double>(shots.size()));
    };
    Eigen::Vector2d m0 = mean_of(shots0);
    Eigen::Vector2d m1 = mean_of(shots1);
    Eigen::Matrix2d scatter = Eigen::Matrix2d::Zero();
    for (const auto& z : shots0) {
        Eigen::Vector2d d = Eigen::Vector2d(z[0], z[1]) - m0;
        scatter += d * d.transpose();
    }
    for (const auto& z : shots1) {
        Eigen::Vector2d d = Eigen::Vector2d(z[0], z[1]) - m1;
        scatter += d * d.transpose();
    }
    Eigen::Matrix2d pooled = scatter / static_cast<double>(shots0.size() + shots1.size() - 2);
    if (!(pooled.determinant() > 1e-12 * std::max(1.0, pooled.squaredNorm()))) {
        throw DegenerateDataError("pooled covariance of the calibration shots is singular");
    }
    return Classifier(m0, m1, pooled);
}

std::vector<IQPoint> draw_calibration_shots(const IQModel& iq, int state, std::size_t n, std::uint64_t seed) {
    iq.validate();
    Eigen::Matrix2d chol = iq.covariance.llt().matrixL();
    std::vector<IQPoint> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng = stream_rng(seed, i);
        std::normal_distribution<double> gauss;
        Eigen::Vector2d noise(gauss(rng), gauss(rng));
        Eigen::Vector2d z = iq.means[state ? 1 : 0] + chol * noise;
        out[i] = {static_cast<float>(z[0]), static_cast<float>(z[1])};
    }
    return out;
}

std::vector<double> apply_soft_weights(const DecodingGraph& graph, const ShotRecord& shot,
                                       const Classifier& classifier) {
    if (!shot.has_soft()) {
        throw ConfigurationError("shot has no soft readout values");
    }
    std::vector<double> weights(graph.edges().size());
    bool any_tagged = false;
    for (std::size_t i = 0; i < graph.edges().size(); ++i) {
        const Edge& e = graph.edges()[i];
        if (e.measurement == kNoMeasurement) {
            weights[i] = e.weight;
            continue;
        }
        any_tagged = true;
        if (static_cast<std::size_t>(e.measurement) >= shot.soft.size()) {
            throw ConfigurationError("edge tagged with measurement " + std::to_string(e.measurement) +
                                     " beyond the shot's record");
        }
        double w = classifier.soft_weight(shot.soft[static_cast<std::size_t>(e.measurement)]);
        if (e.other_probability <= 0) {
            weights[i] = w;
        } else {
            double p_meas = 1 / (1 + std::exp(w));
            weights[i] = edge_weight(xor_probability(p_meas, e.other_probability));
        }
    }
    if (!any_tagged) {
        throw ConfigurationError("graph has no measurement-tagged edges to overlay");
    }
    return weights;
}

std::vector<double> PairwiseEstimate::edge_probabilities(const DecodingGraph& graph) const {
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> pair_p;
    for (const auto& e : edges) pair_p[{e.u, e.v}] = e.probability;

    // Pick one representative edge per node pair: the most probable under the template.
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> representative;
    const auto& ge = graph.edges();
    for (std::size_t i = 0; i < ge.size(); ++i) {
        auto key = std::make_pair(ge[i].u, ge[i].v);
        auto it = representative.find(key);
        if (it == representative.end() || ge[i].probability > ge[it->second].probability) representative[key] = i;
    }
    std::vector<double> out(ge.size(), 0.0);
    for (const auto& [key, idx] : representative) {
        if (key.second == kBoundary) {
            out[idx] = key.first < boundary.size() ? boundary[key.first] : 0.0;
        } else {
            auto it = pair_p.find(key);
            out[idx] = it == pair_p.end() ? 0.0 : it->second;
        }
    }
    return out;
}

PairwiseAccumulator::PairwiseAccumulator(const DecodingGraph& topology)
    : num_detectors_(topology.num_detectors()), incident_pairs_(topology.num_detectors()) {
    for (const auto& e : topology.edges()) {
        if (!e.is_boundary()) pairs_.emplace_back(std::min(e.u, e.v), std::max(e.u, e.v));
    }
    std::sort(pairs_.begin(), pairs_.end());
    pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
    for (std::uint32_t k = 0; k < pairs_.size(); ++k) {
        incident_pairs_[pairs_[k].first].push_back(k);
        incident_pairs_[pairs_[k].second].push_back(k);
    }
    single_.assign(num_detectors_, 0);
    joint_.assign(pairs_.size(), 0);
}

void PairwiseAccumulator::add(std::span<const std::uint8_t> detectors) {
    if (detectors.size() != num_detectors_) {
        throw std::invalid_argument("defect sample has the wrong number of detectors");
    }
    ++shots_;
    for (std::size_t i = 0; i < num_detectors_; ++i) single_[i] += detectors[i] & 1;
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
        joint_[k] += (detectors[pairs_[k].first] & detectors[pairs_[k].second] & 1);
    }
}

void PairwiseAccumulator::merge(const PairwiseAccumulator& other) {
    if (other.pairs_ != pairs_) throw std::invalid_argument("cannot merge accumulators over different topologies");
    shots_ += other.shots_;
    for (std::size_t i = 0; i < single_.size(); ++i) single_[i] += other.single_[i];
    for (std::size_t k = 0; k < joint_.size(); ++k) joint_[k] += other.joint_[k];
}

PairwiseEstimate PairwiseAccumulator::estimate(std::size_t min_shots) const {
    if (shots_ < min_shots || shots_ == 0) {
        throw std::invalid_argument("pairwise estimation needs at least " + std::to_string(min_shots) +
                                    " shots, got " + std::to_string(shots_));
    }
    const double n = static_cast<double>(shots_);
    PairwiseEstimate out;
    out.shots = shots_;
    std::vector<double> mean(num_detectors_);
    for (std::size_t i = 0; i < num_detectors_; ++i) mean[i] = static_cast<double>(single_[i]) / n;

    for (std::size_t k = 0; k < pairs_.size(); ++k) {
        auto [i, j] = pairs_[k];
        double xij = static_cast<double>(joint_[k]) / n;
        double denom = 1 - 2 * mean[i] - 2 * mean[j] + 4 * xij;
        PairwiseEstimate::PairEdge e{i, j, 0.0, EstimateFlag::Ok};
        if (std::abs(denom) < 1e-12) {
            e.flag = EstimateFlag::Undefined;
        } else {
            double disc = 1 - 4 * (xij - mean[i] * mean[j]) / denom;
            if (disc < 0) {
                e.flag = EstimateFlag::Clamped;
            } else {
                e.probability = 0.5 - 0.5 * std::sqrt(disc);
                if (e.probability < 0) {
                    e.probability = 0;
                    e.flag = EstimateFlag::Clamped;
                }
            }
        }
        out.edges.push_back(e);
    }

    out.boundary.assign(num_detectors_, 0.0);
    out.boundary_flags.assign(num_detectors_, EstimateFlag::Ok);
    for (std::size_t i = 0; i < num_detectors_; ++i) {
        double product = 1;
        for (auto k : incident_pairs_[i]) product *= 1 - 2 * out.edges[k].probability;
        if (std::abs(product) < 1e-12) {
            out.boundary_flags[i] = EstimateFlag::Undefined;
            continue;
        }
        double pb = 0.5 - 0.5 * (1 - 2 * mean[i]) / product;
        if (pb < 0) {
            pb = 0;
            out.boundary_flags[i] = EstimateFlag::Clamped;
        }
        out.boundary[i] = pb;
    }
    return out;
}

PairwiseEstimate estimate_pairwise(std::span<const std::vector<std::uint8_t>> samples, const DecodingGraph& topology,
                                   std::size_t min_shots) {
    PairwiseAccumulator acc(topology);
    for (const auto& s : samples) acc.add(s);
    return acc.estimate(min_shots);
}

std::vector<std::vector<std::uint8_t>> sample_graph_syndromes(const DecodingGraph& graph, std::size_t shots,
                                                              std::uint64_t seed) {
    std::vector<std::vector<std::uint8_t>> out(shots, std::vector<std::uint8_t>(graph.num_detectors(), 0));
    const auto& edges = graph.edges();
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const Edge& e = edges[k];
        if (e.probability <= 0) continue;
        Rng rng = stream_rng(seed, k);
        // Geometric gaps between successive flips of this edge.
        std::geometric_distribution<std::size_t> gap(e.probability);
        for (std::size_t shot = gap(rng); shot < shots; shot += 1 + gap(rng)) {
            out[shot][e.u] ^= 1;
            if (!e.is_boundary()) out[shot][e.v] ^= 1;
        }
    }
    return out;
}

}  // namespace rtqec
