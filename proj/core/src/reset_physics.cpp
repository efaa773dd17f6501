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

#include "rtqec/reset_physics.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "rtqec/curve_fit.hpp"
#include "rtqec/parallel.hpp"
#include "rtqec/rng.hpp"
#include "rtqec/t1_clock.hpp"
#include "rtqec/text.hpp"

namespace rtqec {

DispersiveParams DispersiveParams::from_coupling(double g, double delta, double kappa, double n0, double t1) {
    if (delta == 0) throw std::invalid_argument("qubit-resonator detuning must be nonzero");
    DispersiveParams p;
    p.g = g;
    p.delta = delta;
    p.chi = g * g / delta;
    p.kappa = kappa;
    p.n0 = n0;
    p.t1 = t1;
    p.validate();
    return p;
}

DispersiveParams DispersiveParams::from_chi(double chi, double kappa, double n0) {
    DispersiveParams p;
    p.chi = chi;
    p.kappa = kappa;
    p.n0 = n0;
    p.validate();
    return p;
}

void DispersiveParams::validate() const {
    if (!(kappa > 0)) throw std::invalid_argument("kappa must be positive");
    if (!(n0 > 0)) throw std::invalid_argument("n0 must be positive");
    if (chi == 0 || !std::isfinite(chi)) throw std::invalid_argument("chi must be nonzero and finite");
    if (delta != 0 && (chi > 0) != (delta > 0)) throw std::invalid_argument("chi must share the sign of delta");
}

double steady_photon_number(double delta_r, QubitState state, const DispersiveParams& params) {
    double shift = state == QubitState::Ground ? delta_r + params.chi : delta_r - params.chi;
    return params.n0 / (1 + 4 * shift * shift / (params.kappa * params.kappa));
}

double stark_shift(double n_bar, const DispersiveParams& params) {
    if (n_bar < 0) throw std::invalid_argument("photon number must be >= 0");
    return 2 * params.chi * n_bar;
}

namespace {

double lorentz(double x, double centre, double width) {
    double u = 2 * (x - centre) / width;
    return 1 / (1 + u * u);
}

double branch_centre(double dr, QubitState s, const DispersiveParams& p) {
    return stark_shift(steady_photon_number(dr, s, p), p);
}

}  // namespace

TwoToneMap synth_two_tone(const DispersiveParams& params, std::span<const double> delta_r,
                          std::span<const double> delta_q, double linewidth, double noise_sd, std::uint64_t seed,
                          unsigned threads) {
    params.validate();
    if (delta_r.empty() || delta_q.empty()) throw std::invalid_argument("two-tone grids must be non-empty");
    if (!(linewidth > 0)) throw std::invalid_argument("probe linewidth must be positive");
    if (!(noise_sd >= 0)) throw std::invalid_argument("noise_sd must be >= 0");
    TwoToneMap map;
    map.delta_r.assign(delta_r.begin(), delta_r.end());
    map.delta_q.assign(delta_q.begin(), delta_q.end());
    map.population.resize(delta_r.size() * delta_q.size());
    const std::size_t cols = delta_q.size();
    parallel_for(delta_r.size(), threads, [&](std::size_t r) {
        Rng rng = stream_rng(seed, r);
        std::normal_distribution<double> noise(0.0, 1.0);
        double ce = branch_centre(delta_r[r], QubitState::Excited, params);
        double cg = branch_centre(delta_r[r], QubitState::Ground, params);
        for (std::size_t c = 0; c < cols; ++c) {
            double v = 0.5 - 0.5 * lorentz(delta_q[c], ce, linewidth) + 0.5 * lorentz(delta_q[c], cg, linewidth);
            if (noise_sd > 0) v += noise_sd * noise(rng);
            map.population[r * cols + c] = std::clamp(v, 0.0, 1.0);
        }
    });
    return map;
}

namespace {

struct RowCentres {
    double dr, ce, cg, width;
};

// Dip and rise positions along one probe sweep, or nothing if they are not resolved.
std::optional<RowCentres> fit_row(const TwoToneMap& map, std::size_t r) {
    const auto& q = map.delta_q;
    const std::size_t n = q.size();
    std::size_t imax = 0, imin = 0;
    for (std::size_t c = 1; c < n; ++c) {
        if (map.at(r, c) > map.at(r, imax)) imax = c;
        if (map.at(r, c) < map.at(r, imin)) imin = c;
    }
    double hi = map.at(r, imax) - 0.5, lo = 0.5 - map.at(r, imin);
    if (hi < 0.15 || lo < 0.15) return std::nullopt;

    // Initial width from the half-maximum span around the rise.
    auto half_width = [&](std::size_t i0, double sign, double height) {
        std::size_t a = i0, b = i0;
        while (a > 0 && sign * (map.at(r, a - 1) - 0.5) > height / 2) --a;
        while (b + 1 < n && sign * (map.at(r, b + 1) - 0.5) > height / 2) ++b;
        return std::max(q[b] - q[a], std::abs(q[std::min(n - 1, i0 + 1)] - q[i0]));
    };
    double w0 = 0.5 * (half_width(imax, 1, hi) + half_width(imin, -1, lo));

    Eigen::VectorXd x0(5);
    x0 << q[imax], q[imin], hi, lo, std::log(w0);
    auto residuals = [&](const Eigen::VectorXd& x, Eigen::VectorXd& res) {
        double w = std::exp(x[4]);
        for (std::size_t c = 0; c < n; ++c) {
            double model = 0.5 + x[2] * lorentz(q[c], x[0], w) - x[3] * lorentz(q[c], x[1], w);
            res[Eigen::Index(c)] = model - map.at(r, c);
        }
    };
    LeastSquaresResult fit;
    try {
        fit = least_squares(residuals, n, x0);
    } catch (const FitError&) {
        return std::nullopt;
    }
    double w = std::exp(fit.x[4]);
    double cg = fit.x[0], ce = fit.x[1];
    auto [qmin, qmax] = std::minmax_element(q.begin(), q.end());
    if (std::abs(cg - ce) < w || cg < *qmin || cg > *qmax || ce < *qmin || ce > *qmax) return std::nullopt;
    if (fit.x[2] <= 0 || fit.x[3] <= 0) return std::nullopt;
    return RowCentres{map.delta_r[r], ce, cg, w};
}

}  // namespace

TwoToneFit fit_two_tone(const TwoToneMap& map) {
    if (map.delta_r.empty() || map.delta_q.size() < 8 ||
        map.population.size() != map.delta_r.size() * map.delta_q.size()) {
        throw std::invalid_argument("two-tone map is empty or malformed");
    }
    std::vector<RowCentres> rows;
    for (std::size_t r = 0; r < map.delta_r.size(); ++r) {
        if (auto row = fit_row(map, r)) rows.push_back(*row);
    }
    if (rows.size() < 6) {
        throw FitDegenerateError("only " + std::to_string(rows.size()) +
                                 " resonator detunings show two resolved branches; need at least 6");
    }

    // The excited branch peaks at δr = χ and the ground branch at δr = -χ.
    auto re = std::max_element(rows.begin(), rows.end(),
                               [](const auto& a, const auto& b) { return std::abs(a.ce) < std::abs(b.ce); });
    auto rg = std::max_element(rows.begin(), rows.end(),
                               [](const auto& a, const auto& b) { return std::abs(a.cg) < std::abs(b.cg); });
    double chi0 = 0.5 * (re->dr - rg->dr);
    if (chi0 == 0) throw FitDegenerateError("branch peaks coincide; cannot separate the dispersive shift");
    double n00 = 0.5 * (re->ce + rg->cg) / (2 * chi0);
    if (!(n00 > 0)) n00 = 1;

    const std::size_t m = rows.size();
    auto residuals = [&](const Eigen::VectorXd& x, Eigen::VectorXd& res) {
        DispersiveParams p;
        p.chi = x[0];
        p.kappa = std::exp(x[1]);
        p.n0 = x[2];
        for (std::size_t i = 0; i < m; ++i) {
            res[Eigen::Index(2 * i)] = 2 * p.chi * steady_photon_number(rows[i].dr, QubitState::Excited, p) - rows[i].ce;
            res[Eigen::Index(2 * i + 1)] = 2 * p.chi * steady_photon_number(rows[i].dr, QubitState::Ground, p) - rows[i].cg;
        }
    };
    LeastSquaresResult best;
    best.rms = std::numeric_limits<double>::infinity();
    for (double scale : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        Eigen::VectorXd x0(3);
        x0 << chi0, std::log(std::abs(chi0) * scale), n00;
        try {
            LeastSquaresResult fit = least_squares(residuals, 2 * m, x0);
            if (fit.rms < best.rms) best = fit;
        } catch (const FitError&) {
        }
    }
    if (!std::isfinite(best.rms)) throw FitError("two-tone centre fit did not converge");

    TwoToneFit out;
    out.chi = best.x[0];
    out.kappa = std::exp(best.x[1]);
    out.n0 = best.x[2];
    out.rms = best.rms;
    out.rows = m;
    double wsum = 0;
    for (const auto& r : rows) wsum += r.width;
    out.linewidth = wsum / static_cast<double>(m);
    return out;
}

double ResetDecayFit::operator()(double tau) const { return a + b * std::exp(-tau / T); }

ResetDecayFit fit_reset_decay(std::span<const double> tau, std::span<const double> pop) {
    DecayFit d = fit_exponential(tau, pop);
    return {d.B, d.A, d.T1, d.rms};
}

void write_two_tone_csv(std::ostream& out, const TwoToneMap& map) {
    out << "delta_r\\delta_q";
    for (double q : map.delta_q) out << ',' << format_double(q, 12);
    out << '\n';
    for (std::size_t r = 0; r < map.delta_r.size(); ++r) {
        out << format_double(map.delta_r[r], 12);
        for (std::size_t c = 0; c < map.delta_q.size(); ++c) out << ',' << format_double(map.at(r, c), 12);
        out << '\n';
    }
}

TwoToneMap read_two_tone_csv(std::istream& in) {
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        return cells;
    };
    TwoToneMap map;
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("two-tone CSV is empty");
    auto header = split(line);
    for (std::size_t i = 1; i < header.size(); ++i) map.delta_q.push_back(std::stod(header[i]));
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto cells = split(line);
        if (cells.size() != map.delta_q.size() + 1) {
            throw std::invalid_argument("two-tone CSV line " + std::to_string(lineno) + " has " +
                                        std::to_string(cells.size()) + " cells");
        }
        map.delta_r.push_back(std::stod(cells[0]));
        for (std::size_t i = 1; i < cells.size(); ++i) map.population.push_back(std::stod(cells[i]));
    }
    return map;
}

std::string two_tone_fit_json(const TwoToneFit& fit) {
    nlohmann::ordered_json j;
    j["chi_mhz"] = fit.chi;
    j["kappa_mhz"] = fit.kappa;
    j["n0"] = fit.n0;
    j["rms_mhz"] = fit.rms;
    j["rows_used"] = fit.rows;
    j["probe_linewidth_mhz"] = fit.linewidth;
    return j.dump(2);
}

std::string reset_fit_json(const ResetDecayFit& fit) {
    nlohmann::ordered_json j;
    j["a"] = fit.a;
    j["b"] = fit.b;
    j["T_us"] = fit.T;
    j["rms"] = fit.rms;
    return j.dump(2);
}

}  // namespace rtqec
