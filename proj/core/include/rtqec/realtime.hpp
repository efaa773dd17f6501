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
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtqec/rng.hpp"

namespace rtqec {

/// Gamma(k, θ) with θ in µs.
struct GammaFit {
    double k = 1;
    double theta = 1;

    double mean() const { return k * theta; }
    void validate() const;
};

class DegenerateFitError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

class InsufficientDataError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Where decode durations come from: a constant, a resampled list of measurements, or a Gamma law.
class DecodeTimeSource {
   public:
    enum class Kind { Fixed, Empirical, Gamma };

    static DecodeTimeSource fixed(double us);
    static DecodeTimeSource empirical(std::vector<double> samples_us);
    static DecodeTimeSource gamma(GammaFit fit);

    Kind kind() const { return kind_; }
    double draw(Rng& rng) const;
    double mean() const;
    void validate() const;
    const std::vector<double>& samples() const { return samples_; }
    const GammaFit& gamma_fit() const { return gamma_; }

   private:
    Kind kind_ = Kind::Fixed;
    double fixed_ = 0;
    std::vector<double> samples_;
    GammaFit gamma_;
};

/// All durations in µs.
struct LatencyModel {
    double round_time = 1.7;
    double readout_propagation = 1.4;
    double buffer_time = 0.05;
    double control_logic = 1.7;
    DecodeTimeSource decode_time = DecodeTimeSource::fixed(6.5);

    void validate() const;
};

struct ResponseBreakdown {
    double decode = 0;
    double propagation = 0;
    double control = 0;
    double total = 0;

    double latency() const { return propagation + control; }
};

/// Expected breakdown; the decode term is the mean of the source for the full syndrome.
ResponseBreakdown response_time(const LatencyModel& model, std::size_t rounds);
/// One breakdown per draw from the decode source.
std::vector<ResponseBreakdown> sample_response_times(const LatencyModel& model, std::size_t rounds, std::size_t n,
                                                     std::uint64_t seed);
/// R rounds back to back, then one propagation, the control path and the decode.
double run_duration(const LatencyModel& model, std::size_t rounds);

std::string format_breakdown_table(const ResponseBreakdown& b);
std::string breakdown_json(const ResponseBreakdown& b, std::size_t rounds);

enum class EventKind : std::uint8_t { RoundStart, RoundEnd, Buffer, Send, DecodeStart, DecodeEnd, Feedback };
const char* to_string(EventKind kind);

struct TimelineEvent {
    EventKind kind;
    double t_us;
    std::int64_t queue_depth;  // rounds generated minus rounds consumed
    std::uint64_t rounds_consumed;
};

struct Timeline {
    std::size_t total_rounds = 0;
    std::size_t window_rounds = 0;
    double round_time = 0;
    std::vector<TimelineEvent> events;

    std::int64_t max_queue_depth() const;
};

/// Producer emits one round every round_time; the single consumer decodes windows of
/// `window_rounds` rounds once they are available, paying one decode draw per round. The
/// simulation stops at the production horizon total_rounds * round_time.
Timeline simulate_stream(const LatencyModel& model, std::size_t total_rounds, std::size_t window_rounds,
                         std::uint64_t seed = 0);

void write_timeline_csv(std::ostream& out, const Timeline& timeline);

struct BacklogResult {
    bool growing = false;
    double slope = 0;  // queue rounds per consumed round
    std::size_t points = 0;
};

/// Least-squares slope of queue depth at decode completions against rounds consumed, over
/// the second half of the horizon. Growing when the slope exceeds 1e-3.
BacklogResult detect_backlog(const Timeline& timeline);

/// Method of moments. Needs at least 30 positive samples.
GammaFit fit_gamma(std::span<const double> samples);

/// E[exp(-x / T1)] for x ~ Gamma(k, θ).
double expected_exp_decay(const GammaFit& fit, double t1);

struct BiasedDelay {
    double td_tilde;  // -T1 log E[exp(-T_d / T1)]
    double ratio;     // td_tilde / (k θ)
};
BiasedDelay biased_delay_estimate(const GammaFit& fit, double t1);

}  // namespace rtqec
