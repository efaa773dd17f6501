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

#include "rtqec/realtime.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <queue>

#include "rtqec/text.hpp"

namespace rtqec {

void GammaFit::validate() const {
    if (!(k > 0) || !(theta > 0) || !std::isfinite(k) || !std::isfinite(theta)) {
        throw std::invalid_argument("Gamma parameters must be positive and finite");
    }
}

DecodeTimeSource DecodeTimeSource::fixed(double us) {
    DecodeTimeSource s;
    s.kind_ = Kind::Fixed;
    s.fixed_ = us;
    s.validate();
    return s;
}

DecodeTimeSource DecodeTimeSource::empirical(std::vector<double> samples_us) {
    DecodeTimeSource s;
    s.kind_ = Kind::Empirical;
    s.samples_ = std::move(samples_us);
    s.validate();
    return s;
}

DecodeTimeSource DecodeTimeSource::gamma(GammaFit fit) {
    DecodeTimeSource s;
    s.kind_ = Kind::Gamma;
    s.gamma_ = fit;
    s.validate();
    return s;
}

void DecodeTimeSource::validate() const {
    switch (kind_) {
        case Kind::Fixed:
            if (!(fixed_ >= 0) || !std::isfinite(fixed_)) throw std::invalid_argument("decode time must be >= 0");
            break;
        case Kind::Empirical:
            if (samples_.empty()) throw std::invalid_argument("empirical decode-time list is empty");
            for (double v : samples_) {
                if (!(v >= 0) || !std::isfinite(v)) throw std::invalid_argument("decode-time samples must be >= 0");
            }
            break;
        case Kind::Gamma:
            gamma_.validate();
            break;
    }
}

double DecodeTimeSource::draw(Rng& rng) const {
    switch (kind_) {
        case Kind::Fixed:
            return fixed_;
        case Kind::Empirical:
            return samples_[std::uniform_int_distribution<std::size_t>(0, samples_.size() - 1)(rng)];
        case Kind::Gamma:
            return std::gamma_distribution<double>(gamma_.k, gamma_.theta)(rng);
    }
    return 0;
}

double DecodeTimeSource::mean() const {
    switch (kind_) {
        case Kind::Fixed:
            return fixed_;
        case Kind::Empirical:
            return std::accumulate(samples_.begin(), samples_.end(), 0.0) / static_cast<double>(samples_.size());
        case Kind::Gamma:
            return gamma_.mean();
    }
    return 0;
}

void LatencyModel::validate() const {
    for (double v : {round_time, readout_propagation, buffer_time, control_logic}) {
        if (!(v >= 0) || !std::isfinite(v)) throw std::invalid_argument("latency durations must be >= 0");
    }
    decode_time.validate();
}

namespace {

ResponseBreakdown breakdown_with(const LatencyModel& model, double decode) {
    ResponseBreakdown b;
    b.decode = decode;
    b.propagation = model.readout_propagation;
    b.control = model.control_logic;
    b.total = b.decode + b.propagation + b.control;
    return b;
}

void require_rounds(std::size_t rounds) {
    if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
}

}  // namespace

ResponseBreakdown response_time(const LatencyModel& model, std::size_t rounds) {
    require_rounds(rounds);
    model.validate();
    return breakdown_with(model, model.decode_time.mean());
}

std::vector<ResponseBreakdown> sample_response_times(const LatencyModel& model, std::size_t rounds, std::size_t n,
                                                     std::uint64_t seed) {
    require_rounds(rounds);
    model.validate();
    Rng rng(stream_seed(seed, 0));
    std::vector<ResponseBreakdown> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(breakdown_with(model, model.decode_time.draw(rng)));
    return out;
}

double run_duration(const LatencyModel& model, std::size_t rounds) {
    return static_cast<double>(rounds) * model.round_time + response_time(model, rounds).total;
}

std::string format_breakdown_table(const ResponseBreakdown& b) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "%-12s %10s\n%-12s %10.3f\n%-12s %10.3f\n%-12s %10.3f\n%-12s %10.3f\n", "component", "us",
                  "decode", b.decode, "propagation", b.propagation, "control", b.control, "total", b.total);
    return buf;
}

std::string breakdown_json(const ResponseBreakdown& b, std::size_t rounds) {
    return "{\"rounds\": " + std::to_string(rounds) + ", \"decode_us\": " + format_double(b.decode) +
           ", \"propagation_us\": " + format_double(b.propagation) + ", \"control_us\": " +
           format_double(b.control) + ", \"latency_us\": " + format_double(b.latency()) +
           ", \"total_us\": " + format_double(b.total) + "}";
}

const char* to_string(EventKind kind) {
    switch (kind) {
        case EventKind::RoundStart: return "round_start";
        case EventKind::RoundEnd: return "round_end";
        case EventKind::Buffer: return "buffer";
        case EventKind::Send: return "send";
        case EventKind::DecodeStart: return "decode_start";
        case EventKind::DecodeEnd: return "decode_end";
        case EventKind::Feedback: return "feedback";
    }
    return "?";
}

std::int64_t Timeline::max_queue_depth() const {
    std::int64_t m = 0;
    for (const auto& e : events) m = std::max(m, e.queue_depth);
    return m;
}

Timeline simulate_stream(const LatencyModel& model, std::size_t total_rounds, std::size_t window_rounds,
                         std::uint64_t seed) {
    if (window_rounds < 1) throw std::invalid_argument("window_rounds must be >= 1");
    model.validate();
    Timeline tl;
    tl.total_rounds = total_rounds;
    tl.window_rounds = window_rounds;
    tl.round_time = model.round_time;
    const double horizon = static_cast<double>(total_rounds) * model.round_time;
    Rng rng(stream_seed(seed, 0));

    // Pending events ordered by time, then by insertion order for ties.
    struct Pending {
        double t;
        std::uint64_t order;
        EventKind kind;
        bool operator>(const Pending& o) const { return t != o.t ? t > o.t : order > o.order; }
    };
    std::priority_queue<Pending, std::vector<Pending>, std::greater<>> pending;
    std::uint64_t order = 0;
    auto schedule = [&](double t, EventKind k) { pending.push({t, order++, k}); };

    std::uint64_t generated = 0;  // rounds whose measurements completed
    std::uint64_t delivered = 0;  // rounds whose data reached the decoder
    std::uint64_t consumed = 0;   // rounds folded into a finished decode
    std::uint64_t in_flight = 0;  // rounds of the window being decoded
    bool busy = false;
    std::uint64_t next_round = 0;

    auto record = [&](EventKind k, double t) {
        tl.events.push_back({k, t, static_cast<std::int64_t>(generated - consumed), consumed});
    };
    auto try_start = [&](double t) {
        if (busy || delivered - consumed < window_rounds) return;
        busy = true;
        in_flight = window_rounds;
        double cost = 0;
        for (std::size_t i = 0; i < window_rounds; ++i) cost += model.decode_time.draw(rng);
        record(EventKind::DecodeStart, t);
        schedule(t + cost, EventKind::DecodeEnd);
    };

    if (total_rounds > 0) schedule(0.0, EventKind::RoundStart);
    while (!pending.empty()) {
        Pending ev = pending.top();
        if (ev.t > horizon) break;
        pending.pop();
        switch (ev.kind) {
            case EventKind::RoundStart:
                record(ev.kind, ev.t);
                schedule(ev.t + model.round_time, EventKind::RoundEnd);
                break;
            case EventKind::RoundEnd:
                ++generated;
                ++next_round;
                record(ev.kind, ev.t);
                if (next_round < total_rounds) schedule(ev.t, EventKind::RoundStart);
                schedule(ev.t + model.buffer_time, EventKind::Buffer);
                break;
            case EventKind::Buffer:
                record(ev.kind, ev.t);
                schedule(ev.t, EventKind::Send);
                break;
            case EventKind::Send:
                ++delivered;
                record(ev.kind, ev.t);
                try_start(ev.t);
                break;
            case EventKind::DecodeEnd:
                consumed += in_flight;
                in_flight = 0;
                busy = false;
                record(ev.kind, ev.t);
                if (consumed == total_rounds) {
                    schedule(ev.t + model.readout_propagation + model.control_logic, EventKind::Feedback);
                }
                try_start(ev.t);
                break;
            case EventKind::Feedback:
                record(ev.kind, ev.t);
                break;
            case EventKind::DecodeStart:
                break;
        }
    }
    return tl;
}

void write_timeline_csv(std::ostream& out, const Timeline& timeline) {
    out << "event,t_us,queue_depth\n";
    for (const auto& e : timeline.events) {
        out << to_string(e.kind) << ',' << format_double(e.t_us, 12) << ',' << e.queue_depth << '\n';
    }
}

BacklogResult detect_backlog(const Timeline& timeline) {
    if (timeline.total_rounds < 1000) {
        throw InsufficientDataError("backlog detection needs at least 1000 rounds, timeline has " +
                                    std::to_string(timeline.total_rounds));
    }
    const double half = 0.5 * static_cast<double>(timeline.total_rounds) * timeline.round_time;
    std::vector<double> xs, ys;
    for (const auto& e : timeline.events) {
        if (e.kind == EventKind::DecodeEnd && e.t_us >= half) {
            xs.push_back(static_cast<double>(e.rounds_consumed));
            ys.push_back(static_cast<double>(e.queue_depth));
        }
    }
    if (xs.size() < 2 || xs.front() == xs.back()) {
        throw InsufficientDataError("fewer than two decode completions in the second half of the timeline");
    }
    const double n = static_cast<double>(xs.size());
    double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    BacklogResult r;
    r.slope = sxy / sxx;
    r.growing = r.slope > 1e-3;
    r.points = xs.size();
    return r;
}

GammaFit fit_gamma(std::span<const double> samples) {
    if (samples.size() < 30) {
        throw std::invalid_argument("fit_gamma needs at least 30 samples, got " + std::to_string(samples.size()));
    }
    double sum = 0;
    for (double v : samples) {
        if (!(v > 0) || !std::isfinite(v)) throw std::invalid_argument("fit_gamma samples must be positive");
        sum += v;
    }
    const double n = static_cast<double>(samples.size());
    const double mean = sum / n;
    double ss = 0;
    for (double v : samples) ss += (v - mean) * (v - mean);
    const double var = ss / (n - 1);
    if (!(var > 1e-15 * mean * mean)) {
        throw DegenerateFitError("samples have zero variance; Gamma fit is degenerate");
    }
    return {mean * mean / var, var / mean};
}

double expected_exp_decay(const GammaFit& fit, double t1) {
    if (!(t1 > 0)) throw std::invalid_argument("T1 must be positive");
    return std::exp(-fit.k * std::log1p(fit.theta / t1));
}

BiasedDelay biased_delay_estimate(const GammaFit& fit, double t1) {
    if (!(t1 > 0)) throw std::invalid_argument("T1 must be positive");
    double x = fit.theta / t1;
    BiasedDelay b;
    b.td_tilde = t1 * fit.k * std::log1p(x);
    b.ratio = x == 0 ? 1.0 : std::log1p(x) / x;
    return b;
}

}  // namespace rtqec
