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

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtqec::cli {

/// Invalid configuration; `field` names the offending option.
class ConfigError : public std::invalid_argument {
   public:
    ConfigError(std::string field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

   private:
    std::string field_;
};

struct RunConfig {
    std::string experiment;
    std::vector<std::size_t> rounds;  // detector rounds; the circuit runs one more
    std::size_t shots = 10000;
    double p = 0.03;
    std::uint64_t seed = 1;
    std::string decoder = "mwpm";
    std::string out = "out";
    std::size_t threads = 1;

    // sample / decode / soft-compare
    bool soft = false;
    double iq_error = 0.07;
    std::size_t calibration_shots = 100000;
    std::string input;
    std::string soft_input;
    std::string classifier;

    // realtime
    double round_us = 1.7;
    double propagation_us = 1.4;
    double buffer_us = 0.05;
    double control_us = 1.7;
    double decode_us = 6.5;
    double per_round_decode_us = 0.79;
    double gamma_k = 0;  // > 0 switches per-round decode cost to Gamma(k, theta)
    double gamma_theta = 0;
    std::size_t stream_rounds = 10000;
    std::size_t window = 1;

    // t1clock
    double td_us = 3.0;
    double total_time_us = 10.0;
    double t1_us = 13.0;
    double decay_a = 0.87;
    double decay_b = 0.08;
    std::size_t bootstrap = 200;

    // reset-fit
    double chi_mhz = -2.5;
    double kappa_mhz = 3.0;
    double n0 = 2.0;
    double probe_linewidth_mhz = 0.5;
    double noise_sd = 0.01;
    double reset_a = 0.045;
    double reset_b = 0.9;
    double reset_t_us = 0.31;
    std::size_t reset_shots = 1000;
    std::string decay_input;
};

const std::vector<std::string>& experiment_names();

/// Parses command-line arguments (and any --config file; flags win). Throws ConfigError.
/// Returns false when only help/version output was requested.
bool parse_args(int argc, const char* const* argv, RunConfig& config, std::ostream& out);

/// Throws ConfigError naming the first invalid field.
void validate(const RunConfig& config);

/// FNV-1a over the canonical rendering of every field except output paths.
std::uint64_t config_hash(const RunConfig& config);
std::string canonical_config(const RunConfig& config);

/// Runs the experiment, writing artifacts under config.out and a summary table to `log`.
/// Returns a process exit status.
int run(const RunConfig& config, std::ostream& log);

/// parse_args + validate + run, mapping errors to a diagnostic on `err` and a nonzero status.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rtqec::cli
