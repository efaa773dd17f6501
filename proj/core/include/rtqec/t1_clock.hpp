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
#include <stdexcept>
#include <string>
#include <vector>

#include "rtqec/curve_fit.hpp"
#include "rtqec/realtime.hpp"

namespace rtqec {

/// m(t) = A exp(-t / T1) + B, times in µs.
struct DecayFit {
    double A = 0;
    double T1 = 1;
    double B = 0;
    double rms = 0;

    double operator()(double t) const;
};

/// Least squares over a log-spaced T1 grid (A and B solved linearly per grid point), then a
/// joint Levenberg-Marquardt refinement. With `fixed_B`, only A and T1 are free and two
/// points suffice.
DecayFit fit_exponential(std::span<const double> t, std::span<const double> p,
                         std::optional<double> fixed_B = std::nullopt);

class IllConditionedError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};
class OutOfRangeError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};
class DelayInfeasibleError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// [i][j] with columns summing to one.
using Matrix2 = std::array<std::array<double, 2>, 2>;

/// P(M = i | S = j).
struct ConfusionMatrix {
    Matrix2 p{{{1, 0}, {0, 1}}};

    double p10() const { return p[1][0]; }
    void validate() const;
    /// e0 = P(M=1 | S=0), e1 = P(M=0 | S=1).
    static ConfusionMatrix from_errors(double e0, double e1);
};

/// P(S = i | M = j) right after a measurement.
struct PostMeasurementMatrix {
    Matrix2 q{{{1, 0}, {0, 1}}};
    double clamp = 0;  // total probability mass moved by clamping
};

PostMeasurementMatrix solve_post_measurement(const ConfusionMatrix& pms, const Matrix2& double_stats, double t_r,
                                             const DecayFit& decay);

std::array<double, 2> state_distribution(const std::array<double, 2>& pm1, const PostMeasurementMatrix& q);

struct FeedbackStats {
    std::array<double, 2> pm1{0.5, 0.5};
    double p_m2_given_l0 = 0;
    double p_m2_given_l1 = 0;
    double t_r = 0.5;
    // Shot counts behind the frequencies; zero for analytic inputs.
    std::size_t shots = 0;
    std::size_t shots_l0 = 0;
    std::size_t shots_l1 = 0;
};

double recover_total_time(const FeedbackStats& stats, const ConfusionMatrix& pms, const PostMeasurementMatrix& q,
                          const DecayFit& decay);

struct DelayEstimate {
    double alpha = 1;  // <exp(-T_d / T1)>
    double td = 0;
    bool ambiguous = false;  // both roots in (0, 1]; `alternate` holds the other one
    std::optional<double> alternate_alpha;
    std::optional<double> alternate_td;
};

DelayEstimate recover_delay(const FeedbackStats& stats, const ConfusionMatrix& pms, const PostMeasurementMatrix& q,
                            const DecayFit& decay, double total_time);

/// Feedback delay: fixed, or Gamma distributed.
struct DelaySource {
    double fixed = 0;
    std::optional<GammaFit> gamma;
};

struct ForwardParams {
    DelaySource td;
    double T = 10;
    double T1 = 13;
    ConfusionMatrix pms;
    PostMeasurementMatrix q;
    std::array<double, 2> pm1{0.5, 0.5};
    double l1_fraction = 0.5;
    double t_r = 0.5;
    std::array<double, 2> pm1_double{0.5, 0.5};  // first-measurement marginal of the reference pair
};

/// Reference truth: T1 = 13 µs, P(M=1|S=0) = B = 0.08, P(M=1|S=1) = A + B = 0.95.
ForwardParams reference_forward_params(double td, double T);

struct ForwardResult {
    FeedbackStats stats;
    double match_given_l0 = 0;  // P(M1 = M2 | L = 0)
    double match_given_l1 = 0;
};

/// Per-shot Monte Carlo of the feedback experiment.
ForwardResult forward_simulate(const ForwardParams& params, std::size_t shots, std::uint64_t seed,
                               unsigned threads = 1);
/// Infinite-statistics limit of forward_simulate.
ForwardResult forward_expected(const ForwardParams& params);

/// Exact decay curve of the forward model: A = P11 - P10, B = P10.
DecayFit true_decay(const ForwardParams& params);

struct ReferenceData {
    std::vector<double> t;
    std::vector<double> p;
    std::vector<std::size_t> t_shots;
    ConfusionMatrix pms;
    std::array<std::size_t, 2> pms_shots{0, 0};
    Matrix2 double_stats{{{1, 0}, {0, 1}}};
    std::array<std::size_t, 2> double_shots{0, 0};
    double t_r = 0.5;
};

struct ReferenceConfig {
    std::vector<double> t1_times;  // empty: 26 points over [0, 4 T1]
    std::size_t t1_shots_per_point = 100000;
    std::size_t confusion_shots = 1000000;
    std::size_t double_shots = 1000000;
};

/// Reference datasets under the forward model; binomial counts per point.
ReferenceData simulate_reference(const ForwardParams& params, const ReferenceConfig& config, std::uint64_t seed);
/// Infinite-statistics reference data on the configured time grid.
ReferenceData expected_reference(const ForwardParams& params, const ReferenceConfig& config);

struct ChainResult {
    DecayFit decay;
    PostMeasurementMatrix q;
    std::array<double, 2> ps1{0, 0};
    double total_time = 0;
    DelayEstimate delay;
};

ChainResult run_chain(const ReferenceData& ref, const FeedbackStats& stats);

struct BootstrapResult {
    ChainResult point;
    std::size_t replicates = 0;
    std::size_t failures = 0;
    double td_se = 0;
    double td_lo = 0;  // 2.5th percentile
    double td_hi = 0;  // 97.5th percentile
    double T_se = 0;
    double T_lo = 0;
    double T_hi = 0;
};

/// Parametric bootstrap: every count is redrawn as a binomial around its observed frequency.
BootstrapResult bootstrap_chain(const ReferenceData& ref, const FeedbackStats& stats, std::size_t replicates,
                                std::uint64_t seed);

void write_reference_csv(std::ostream& out, const ReferenceData& ref, const FeedbackStats& stats);
std::pair<ReferenceData, FeedbackStats> read_reference_csv(std::istream& in);
std::string bootstrap_json(const BootstrapResult& r);

}  // namespace rtqec
