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
#include <random>
#include <sstream>

#include "rtqec/realtime.hpp"

using namespace rtqec;

namespace {

LatencyModel with_decode(DecodeTimeSource src) {
    LatencyModel m;
    m.decode_time = std::move(src);
    return m;
}

double mc_exp_decay(double k, double theta, double t1, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::gamma_distribution<double> g(k, theta);
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc += std::exp(-g(rng) / t1);
    return acc / double(n);
}

}  // namespace

TEST(response_time, defaults_give_nine_point_six) {
    auto b = response_time(LatencyModel{}, 9);
    EXPECT_DOUBLE_EQ(b.decode, 6.5);
    EXPECT_DOUBLE_EQ(b.propagation, 1.4);
    EXPECT_DOUBLE_EQ(b.control, 1.7);
    EXPECT_NEAR(b.latency(), 3.1, 1e-12);
    EXPECT_NEAR(b.total, 9.6, 1e-12);
}

TEST(response_time, all_zero) {
    LatencyModel m{0, 0, 0, 0, DecodeTimeSource::fixed(0)};
    EXPECT_EQ(response_time(m, 3).total, 0);
    EXPECT_EQ(run_duration(m, 3), 0);
}

TEST(response_time, empirical_source_is_linear) {
    LatencyModel m = with_decode(DecodeTimeSource::empirical({5.0, 6.0, 7.0}));
    EXPECT_NEAR(response_time(m, 9).total, 6.0 + 3.1, 1e-12);
    auto draws = sample_response_times(m, 9, 30000, 4);
    double mean = 0;
    for (const auto& b : draws) {
        EXPECT_TRUE(b.decode == 5.0 || b.decode == 6.0 || b.decode == 7.0);
        EXPECT_NEAR(b.total - b.decode, 3.1, 1e-12);
        mean += b.total / draws.size();
    }
    EXPECT_NEAR(mean, 9.1, 0.02);
}

TEST(response_time, propagation_is_paid_once) {
    LatencyModel m;
    for (std::size_t r : {1u, 9u, 25u}) {
        EXPECT_NEAR(run_duration(m, r), r * 1.7 + 1.4 + 1.7 + 6.5, 1e-9);
    }
    EXPECT_THROW(response_time(m, 0), std::invalid_argument);
}

TEST(response_time, invalid_model) {
    LatencyModel m;
    m.control_logic = -1;
    EXPECT_THROW(m.validate(), std::invalid_argument);
    EXPECT_THROW(DecodeTimeSource::empirical({}).validate(), std::invalid_argument);
    EXPECT_THROW(DecodeTimeSource::fixed(-0.5).validate(), std::invalid_argument);
    EXPECT_THROW(DecodeTimeSource::gamma({0, 1}).validate(), std::invalid_argument);
}

TEST(response_time, table_and_json) {
    auto b = response_time(LatencyModel{}, 9);
    std::string table = format_breakdown_table(b);
    EXPECT_NE(table.find("decode"), std::string::npos);
    EXPECT_NE(table.find("9.600"), std::string::npos);
    std::string json = breakdown_json(b, 9);
    EXPECT_NE(json.find("\"rounds\": 9"), std::string::npos);
    EXPECT_NE(json.find("\"total_us\": 9.5999999999999996"), std::string::npos);
    EXPECT_NE(json.find("\"decode_us\": 6.5"), std::string::npos);
}

TEST(stream, fast_decoder_keeps_the_queue_bounded) {
    LatencyModel m = with_decode(DecodeTimeSource::fixed(0.79));
    Timeline t = simulate_stream(m, 10000, 1);
    EXPECT_LE(t.max_queue_depth(), 3);
    auto r = detect_backlog(t);
    EXPECT_FALSE(r.growing);
    EXPECT_LT(std::abs(r.slope), 1e-3);
}

TEST(stream, slow_decoder_builds_a_backlog) {
    LatencyModel m = with_decode(DecodeTimeSource::fixed(2.0));
    Timeline t = simulate_stream(m, 10000, 1);
    auto r = detect_backlog(t);
    EXPECT_TRUE(r.growing);
    double expect = (2.0 - 1.7) / 1.7;
    EXPECT_NEAR(r.slope, expect, 0.1 * expect);
    EXPECT_GT(t.max_queue_depth(), 1000);
}

TEST(stream, instant_decoder_never_exceeds_one_window) {
    for (std::size_t window : {1u, 4u, 9u}) {
        Timeline t = simulate_stream(with_decode(DecodeTimeSource::fixed(0)), 2000, window);
        EXPECT_LE(t.max_queue_depth(), std::int64_t(window));
        EXPECT_FALSE(detect_backlog(t).growing);
    }
}

TEST(stream, bounded_exactly_when_cost_fits_the_round) {
    for (double c : {0.44, 1.0, 1.6, 1.69}) {
        EXPECT_FALSE(detect_backlog(simulate_stream(with_decode(DecodeTimeSource::fixed(c)), 4000, 1)).growing) << c;
    }
    for (double c : {1.75, 2.5, 4.0}) {
        EXPECT_TRUE(detect_backlog(simulate_stream(with_decode(DecodeTimeSource::fixed(c)), 4000, 1)).growing) << c;
    }
}

TEST(stream, events_are_ordered_and_queue_nonnegative) {
    LatencyModel m = with_decode(DecodeTimeSource::gamma({4, 0.25}));
    Timeline t = simulate_stream(m, 3000, 3, 42);
    ASSERT_FALSE(t.events.empty());
    double prev = -1;
    std::uint64_t consumed = 0;
    for (const auto& e : t.events) {
        EXPECT_GE(e.t_us, prev);
        EXPECT_GE(e.queue_depth, 0);
        EXPECT_GE(e.rounds_consumed, consumed);
        EXPECT_LE(e.t_us, 3000 * 1.7 + 1e-9);
        prev = e.t_us;
        consumed = e.rounds_consumed;
    }
    Timeline again = simulate_stream(m, 3000, 3, 42);
    ASSERT_EQ(again.events.size(), t.events.size());
    for (std::size_t i = 0; i < t.events.size(); ++i) EXPECT_EQ(again.events[i].t_us, t.events[i].t_us);
}

TEST(stream, short_timelines_are_rejected) {
    Timeline t = simulate_stream(LatencyModel{}, 999, 1);
    EXPECT_THROW(detect_backlog(t), InsufficientDataError);
}

TEST(stream, timeline_csv) {
    Timeline t = simulate_stream(with_decode(DecodeTimeSource::fixed(0.5)), 3, 1);
    std::ostringstream out;
    write_timeline_csv(out, t);
    std::string text = out.str();
    EXPECT_EQ(text.rfind("event,t_us,queue_depth\n", 0), 0u);
    EXPECT_NE(text.find("round_start,0,"), std::string::npos);
    EXPECT_NE(text.find("decode_end,"), std::string::npos);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), static_cast<long>(t.events.size() + 1));
}

TEST(gamma_fit, recovers_generator) {
    Rng rng(8);
    std::gamma_distribution<double> g(4, 0.25);
    std::vector<double> xs(100000);
    for (auto& x : xs) x = g(rng);
    auto fit = fit_gamma(xs);
    EXPECT_NEAR(fit.k, 4, 0.1);
    EXPECT_NEAR(fit.theta, 0.25, 0.01);
}

TEST(gamma_fit, exponential_samples_have_unit_shape) {
    Rng rng(9);
    std::exponential_distribution<double> ex(1 / 0.6);
    std::vector<double> xs(100000);
    for (auto& x : xs) x = ex(rng);
    EXPECT_NEAR(fit_gamma(xs).k, 1, 0.03);
}

TEST(gamma_fit, degenerate_and_short_inputs) {
    std::vector<double> constant(100, 0.7);
    EXPECT_THROW(fit_gamma(constant), DegenerateFitError);
    std::vector<double> few(29, 1.0);
    few[0] = 2;
    EXPECT_THROW(fit_gamma(few), std::invalid_argument);
    std::vector<double> negative(50, 1.0);
    negative[3] = -1;
    EXPECT_THROW(fit_gamma(negative), std::invalid_argument);
}

TEST(exp_decay, closed_form_examples) {
    EXPECT_NEAR(expected_exp_decay({1, 13}, 13), 0.5, 1e-15);
    EXPECT_NEAR(expected_exp_decay({3, 1e-12}, 13), 1.0, 1e-12);
    // Values frozen from an independent scipy evaluation.
    EXPECT_NEAR(expected_exp_decay({2, 0.39}, 13), 0.94259591, 5e-9);
    EXPECT_NEAR(expected_exp_decay({4, 0.1}, 13), 0.96981350, 5e-9);
    EXPECT_NEAR(expected_exp_decay({1, 0.3}, 10), 0.97087379, 5e-9);
    EXPECT_THROW(expected_exp_decay({1, 1}, 0), std::invalid_argument);
}

TEST(exp_decay, monte_carlo_agrees_within_a_tenth_of_a_percent) {
    struct Case {
        double k, theta, t1;
    };
    std::uint64_t seed = 1;
    for (Case c : {Case{2, 0.39, 13}, Case{4, 0.1, 13}, Case{1, 0.3, 10}}) {
        double mc = mc_exp_decay(c.k, c.theta, c.t1, 1000000, seed++);
        double exact = expected_exp_decay({c.k, c.theta}, c.t1);
        EXPECT_LT(std::abs(mc - exact) / exact, 1e-3);
    }
}

TEST(biased_delay, three_percent_bound) {
    auto b = biased_delay_estimate({1, 0.39}, 13);
    EXPECT_NEAR(b.ratio, 0.985293408051481, 1e-12);
    EXPECT_GT(b.ratio, 0.97);
    auto tiny = biased_delay_estimate({2, 1e-9}, 13);
    EXPECT_NEAR(tiny.ratio, 1.0, 1e-9);
}

TEST(biased_delay, two_shape_example_with_monte_carlo_cross_check) {
    auto b = biased_delay_estimate({2, 0.2}, 13);
    EXPECT_NEAR(b.td_tilde, 0.3969542754004979, 1e-12);
    double mc = -13 * std::log(mc_exp_decay(2, 0.2, 13, 1000000, 77));
    EXPECT_NEAR(mc, b.td_tilde, 0.002);
}

TEST(biased_delay, never_exceeds_the_mean_delay) {
    for (double k : {0.5, 1.0, 3.0, 10.0}) {
        for (double theta : {0.01, 0.1, 0.4, 2.0}) {
            auto b = biased_delay_estimate({k, theta}, 13);
            EXPECT_LE(b.td_tilde, k * theta);
            EXPECT_GT(b.ratio, 0);
            EXPECT_LE(b.ratio, 1);
        }
    }
}
