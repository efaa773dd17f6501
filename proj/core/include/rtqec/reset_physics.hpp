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

namespace rtqec {

// Frequencies are ω/2π in MHz throughout. Every formula here is homogeneous in frequency,
// so the 2π factors cancel.

struct DispersiveParams {
    double g = 0;       // coupling
    double delta = 0;   // qubit-resonator detuning, negative
    double chi = 0;     // g^2 / delta
    double kappa = 0;   // resonator linewidth (FWHM)
    double n0 = 1;      // peak photon number
    double t1 = 0;      // µs

    static DispersiveParams from_coupling(double g, double delta, double kappa, double n0, double t1 = 0);
    /// χ, κ and n0 given directly; g and Δ stay unset.
    static DispersiveParams from_chi(double chi, double kappa, double n0);
    void validate() const;
};

enum class QubitState { Ground, Excited };

class FitDegenerateError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// n̄ = n0 / (1 + 4 (δr ± χ)^2 / κ^2); plus for ground, minus for excited.
double steady_photon_number(double delta_r, QubitState state, const DispersiveParams& params);
/// δq = 2 χ n̄.
double stark_shift(double n_bar, const DispersiveParams& params);

/// Population map indexed [row = δr][column = δq probe].
struct TwoToneMap {
    std::vector<double> delta_r;
    std::vector<double> delta_q;
    std::vector<double> population;  // row-major, delta_r.size() x delta_q.size()

    double at(std::size_t r, std::size_t c) const { return population[r * delta_q.size() + c]; }
};

/// Baseline 0.5 with a Lorentzian dip (excited branch) and rise (ground branch) of width
/// `linewidth` along the probe axis, each centred on the branch's Stark shift.
TwoToneMap synth_two_tone(const DispersiveParams& params, std::span<const double> delta_r,
                          std::span<const double> delta_q, double linewidth, double noise_sd, std::uint64_t seed,
                          unsigned threads = 1);

struct TwoToneFit {
    double chi = 0;
    double kappa = 0;
    double n0 = 0;
    double rms = 0;         // centre-model residual RMS in MHz
    std::size_t rows = 0;   // δr rows with both branches resolved
    double linewidth = 0;   // mean fitted probe linewidth
};

TwoToneFit fit_two_tone(const TwoToneMap& map);

struct ResetDecayFit {
    double a = 0;  // steady-state excited population
    double b = 0;
    double T = 0;  // µs
    double rms = 0;

    double operator()(double tau) const;
};

/// f(τ) = a + b exp(-τ / T).
ResetDecayFit fit_reset_decay(std::span<const double> tau, std::span<const double> pop);

void write_two_tone_csv(std::ostream& out, const TwoToneMap& map);
TwoToneMap read_two_tone_csv(std::istream& in);
std::string two_tone_fit_json(const TwoToneFit& fit);
std::string reset_fit_json(const ResetDecayFit& fit);

}  // namespace rtqec
