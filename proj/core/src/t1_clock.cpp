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

#include "rtqec/t1_clock.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "rtqec/parallel.hpp"
#include "rtqec/rng.hpp"
#include "rtqec/text.hpp"

namespace rtqec {

double DecayFit::operator()(double t) const { return A * std::exp(-t / T1) + B; }

namespace {

struct LinearSolution {
    double A, B, sse;
};

// Best A (and B unless fixed) for a given T1.
LinearSolution solve_linear(std::span<const double> t, std::span<const double> p, double t1,
                            std::optional<double> fixed_B) {
    const std::size_t n = t.size();
    double se = 0, see = 0, sp = 0, sep = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double e = std::exp(-t[i] / t1);
        se += e;
        see += e * e;
        sp += p[i];
        sep += e * p[i];
    }
    double A, B;
    if (fixed_B) {
        B = *fixed_B;
        A = see > 0 ? (sep - B * se) / see : 0;
    } else {
        double det = see * static_cast<double>(n) - se * se;
        if (std::abs(det) < 1e-300) {
            A = 0;
            B = sp / static_cast<double>(n);
        } else {
            A = (sep * static_cast<double>(n) - se * sp) / det;
            B = (see * sp - se * sep) / det;
        }
    }
    double sse = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = A * std::exp(-t[i] / t1) + B - p[i];
        sse += r * r;
    }
    return {A, B, sse};
}

}  // namespace

DecayFit fit_exponential(std::span<const double> t, std::span<const double> p, std::optional<double> fixed_B) {
    if (t.size() != p.size()) throw std::invalid_argument("fit_exponential: t and p differ in length");
    const std::size_t min_points = fixed_B ? 2 : 4;
    if (t.size() < min_points) {
        throw std::invalid_argument("fit_exponential needs at least " + std::to_string(min_points) + " points");
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!std::isfinite(t[i]) || !std::isfinite(p[i])) throw std::invalid_argument("fit_exponential: non-finite input");
    }
    auto [tmin, tmax] = std::minmax_element(t.begin(), t.end());
    const double span = *tmax - *tmin;
    if (!(span > 0)) throw FitError("fit_exponential: all times coincide");

    // Two points with B pinned: solve directly.
    if (fixed_B && t.size() == 2) {
        double y0 = p[0] - *fixed_B, y1 = p[1] - *fixed_B;
        if (!(y0 / y1 > 0) || y0 == y1) throw FitError("two-point data do not define a decay");
        double t1 = (t[1] - t[0]) / std::log(y0 / y1);
        if (!(t1 > 0)) throw FitError("two-point data rise instead of decaying");
        return {y0 * std::exp(t[0] / t1), t1, *fixed_B, 0.0};
    }

    const int grid = 80;
    DecayFit best{0, 1, 0, 0};
    double best_sse = std::numeric_limits<double>::infinity();
    for (int g = 0; g < grid; ++g) {
        double t1 = span / 50 * std::pow(1000.0, g / double(grid - 1));
        LinearSolution s = solve_linear(t, p, t1, fixed_B);
        if (s.sse < best_sse) {
            best_sse = s.sse;
            best = {s.A, t1, s.B, 0};
        }
    }
    const double n = static_cast<double>(t.size());
    best.rms = std::sqrt(best_sse / n);
    if (best.rms < 1e-14) return best;

    Eigen::VectorXd x0(fixed_B ? 2 : 3);
    x0[0] = best.A;
    x0[1] = std::log(best.T1);
    if (!fixed_B) x0[2] = best.B;
    auto residuals = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
        double t1 = std::exp(x[1]);
        double b = fixed_B ? *fixed_B : x[2];
        for (std::size_t i = 0; i < t.size(); ++i) r[Eigen::Index(i)] = x[0] * std::exp(-t[i] / t1) + b - p[i];
    };
    LeastSquaresResult lm = least_squares(residuals, t.size(), x0);
    if (lm.rms <= best.rms) {
        best = {lm.x[0], std::exp(lm.x[1]), fixed_B ? *fixed_B : lm.x[2], lm.rms};
    }
    if (!(best.T1 > 0) || !std::isfinite(best.T1) || !std::isfinite(best.A)) {
        throw FitError("exponential fit did not converge (" + describe_status(lm.status) +
                       ", rms=" + format_double(lm.rms, 6) + ")");
    }
    return best;
}

void ConfusionMatrix::validate() const {
    for (int j = 0; j < 2; ++j) {
        if (p[0][j] < 0 || p[1][j] < 0 || p[0][j] > 1 || p[1][j] > 1 || std::abs(p[0][j] + p[1][j] - 1) > 1e-9) {
            throw std::invalid_argument("confusion matrix columns must be probability vectors");
        }
    }
}

ConfusionMatrix ConfusionMatrix::from_errors(double e0, double e1) {
    ConfusionMatrix c;
    c.p = {{{1 - e0, e1}, {e0, 1 - e1}}};
    c.validate();
    return c;
}

PostMeasurementMatrix solve_post_measurement(const ConfusionMatrix& pms, const Matrix2& double_stats, double t_r,
                                             const DecayFit& decay) {
    pms.validate();
    for (int j = 0; j < 2; ++j) {
        if (std::abs(double_stats[0][j] + double_stats[1][j] - 1) > 1e-6) {
            throw std::invalid_argument("double-measurement statistics must be column-stochastic");
        }
    }
    const double e = pms.p10();
    const double m_r = decay(t_r);
    const double denom = m_r - e;
    if (std::abs(denom) < 1e-9) {
        throw IllConditionedError("m(t_r) equals P(M=1|S=0); post-measurement states are not identifiable");
    }
    PostMeasurementMatrix out;
    for (int j = 0; j < 2; ++j) {
        double q1 = (double_stats[1][j] - e) / denom;
        double clamped = std::clamp(q1, 0.0, 1.0);
        out.clamp += std::abs(clamped - q1);
        out.q[1][j] = clamped;
        out.q[0][j] = 1 - clamped;
    }
    return out;
}

std::array<double, 2> state_distribution(const std::array<double, 2>& pm1, const PostMeasurementMatrix& q) {
    std::array<double, 2> s{0, 0};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) s[i] += q.q[i][j] * pm1[j];
    }
    return s;
}

double recover_total_time(const FeedbackStats& stats, const ConfusionMatrix& pms, const PostMeasurementMatrix& q,
                          const DecayFit& decay) {
    auto ps = state_distribution(stats.pm1, q);
    if (ps[1] < 1e-12) throw IllConditionedError("P(S1=1) vanishes; m(T) is undefined");
    const double m = (stats.p_m2_given_l0 - pms.p10() * ps[0]) / ps[1];
    const double top = decay.A + decay.B;
    if (!(m > decay.B) || m > top + 1e-12 || !(decay.A > 0)) {
        throw OutOfRangeError("m(T) = " + format_double(m, 6) + " lies outside (B, A+B) = (" +
                              format_double(decay.B, 6) + ", " + format_double(top, 6) + ")");
    }
    if (m >= top) return 0.0;
    return -decay.T1 * std::log((m - decay.B) / decay.A);
}

DelayEstimate recover_delay(const FeedbackStats& stats, const ConfusionMatrix& pms, const PostMeasurementMatrix& q,
                            const DecayFit& decay, double total_time) {
    auto ps = state_distribution(stats.pm1, q);
    const double e = pms.p10();
    const double B = decay.B;
    const double c = decay(total_time) - B;
    const double P = stats.p_m2_given_l1;
    // (e - B) P1 a^2 + (B - c P1 - P) a + c = 0
    const double qa = (e - B) * ps[1];
    const double qb = B - c * ps[1] - P;
    const double qc = c;

    std::vector<double> roots;
    if (std::abs(qa) <= 1e-12 * (std::abs(qb) + std::abs(qc))) {
        if (qb == 0) throw DelayInfeasibleError("delay equation is degenerate");
        roots.push_back(-qc / qb);
    } else {
        double disc = qb * qb - 4 * qa * qc;
        if (disc < 0) throw DelayInfeasibleError("delay equation has complex roots");
        double s = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
        if (s != 0) {
            roots.push_back(s / qa);
            roots.push_back(qc / s);
        } else {
            roots.push_back(0.0);
        }
    }
    std::vector<double> ok;
    for (double r : roots) {
        if (r > 0 && r <= 1 + 1e-9) ok.push_back(std::min(r, 1.0));
    }
    if (ok.empty()) {
        std::string list;
        for (double r : roots) list += (list.empty() ? "" : ", ") + format_double(r, 6);
        throw DelayInfeasibleError("no root of the delay equation lies in (0, 1]; roots: " + list);
    }
    std::sort(ok.begin(), ok.end(), std::greater<>());
    DelayEstimate d;
    d.alpha = ok[0];
    d.td = -decay.T1 * std::log(d.alpha);
    if (ok.size() > 1 && std::abs(ok[0] - ok[1]) > 1e-12) {
        d.ambiguous = true;
        d.alternate_alpha = ok[1];
        d.alternate_td = -decay.T1 * std::log(ok[1]);
    }
    return d;
}

ForwardParams reference_forward_params(double td, double T) {
    ForwardParams p;
    p.td.fixed = td;
    p.T = T;
    p.T1 = 13;
    p.pms = ConfusionMatrix::from_errors(0.08, 0.05);
    p.q.q = {{{0.97, 0.06}, {0.03, 0.94}}};
    return p;
}

DecayFit true_decay(const ForwardParams& params) {
    return {params.pms.p[1][1] - params.pms.p[1][0], params.T1, params.pms.p[1][0], 0};
}

namespace {

void validate_forward(const ForwardParams& p) {
    p.pms.validate();
    if (!(p.T1 > 0)) throw std::invalid_argument("T1 must be positive");
    if (!(p.T >= 0) || !(p.t_r >= 0)) throw std::invalid_argument("times must be non-negative");
    if (p.l1_fraction < 0 || p.l1_fraction > 1) throw std::invalid_argument("l1_fraction must lie in [0, 1]");
    if (p.td.gamma) {
        p.td.gamma->validate();
    } else if (!(p.td.fixed >= 0)) {
        throw std::invalid_argument("feedback delay must be >= 0");
    }
}

double survival(double t, double t1) { return std::isfinite(t1) ? std::exp(-t / t1) : 1.0; }

struct Tally {
    std::size_t m1[2] = {0, 0};
    std::size_t l[2] = {0, 0};
    std::size_t m2_one[2] = {0, 0};
    std::size_t match[2] = {0, 0};

    void add(const Tally& o) {
        for (int i = 0; i < 2; ++i) {
            m1[i] += o.m1[i];
            l[i] += o.l[i];
            m2_one[i] += o.m2_one[i];
            match[i] += o.match[i];
        }
    }
};

}  // namespace

ForwardResult forward_simulate(const ForwardParams& params, std::size_t shots, std::uint64_t seed, unsigned threads) {
    validate_forward(params);
    constexpr std::size_t kBlock = 4096;
    const std::size_t blocks = (shots + kBlock - 1) / kBlock;
    std::vector<Tally> tallies(blocks);
    const bool decays = std::isfinite(params.T1);

    parallel_for(blocks, threads, [&](std::size_t b) {
        Rng rng = stream_rng(seed, b);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::exponential_distribution<double> life(decays ? 1.0 / params.T1 : 1.0);
        std::optional<std::gamma_distribution<double>> gamma;
        if (params.td.gamma) gamma.emplace(params.td.gamma->k, params.td.gamma->theta);
        auto decay_time = [&]() { return decays ? life(rng) : std::numeric_limits<double>::infinity(); };
        Tally& tally = tallies[b];
        const std::size_t end = std::min(shots, (b + 1) * kBlock);
        for (std::size_t i = b * kBlock; i < end; ++i) {
            int m1 = u(rng) < params.pm1[1] ? 1 : 0;
            int s = u(rng) < params.q.q[1][m1] ? 1 : 0;
            int l = u(rng) < params.l1_fraction ? 1 : 0;
            double td = gamma ? (*gamma)(rng) : params.td.fixed;
            if (l && td < params.T) {
                if (s == 1 && decay_time() < td) s = 0;
                s ^= 1;
                if (s == 1 && decay_time() < params.T - td) s = 0;
            } else if (s == 1 && decay_time() < params.T) {
                s = 0;
            }
            int m2 = u(rng) < params.pms.p[1][s] ? 1 : 0;
            ++tally.m1[m1];
            ++tally.l[l];
            tally.m2_one[l] += m2;
            tally.match[l] += (m1 == m2);
        }
    });

    Tally total;
    for (const auto& t : tallies) total.add(t);
    ForwardResult r;
    const double n = static_cast<double>(shots);
    r.stats.pm1 = {total.m1[0] / n, total.m1[1] / n};
    r.stats.shots = shots;
    r.stats.shots_l0 = total.l[0];
    r.stats.shots_l1 = total.l[1];
    r.stats.t_r = params.t_r;
    auto ratio = [](std::size_t a, std::size_t b) {
        return b ? static_cast<double>(a) / static_cast<double>(b) : std::numeric_limits<double>::quiet_NaN();
    };
    r.stats.p_m2_given_l0 = ratio(total.m2_one[0], total.l[0]);
    r.stats.p_m2_given_l1 = ratio(total.m2_one[1], total.l[1]);
    r.match_given_l0 = ratio(total.match[0], total.l[0]);
    r.match_given_l1 = ratio(total.match[1], total.l[1]);
    return r;
}

ForwardResult forward_expected(const ForwardParams& params) {
    validate_forward(params);
    const double e = params.pms.p[1][0];
    const double A = params.pms.p[1][1] - e;
    const double decayT = survival(params.T, params.T1);
    // Only E[exp(+T_d / T1)] survives: the terms in E[exp(-T_d / T1)] cancel because the
    // flipped |0> reads out with the same P(M=1|S=0) that sets the decay floor.
    double E_inv;
    if (params.td.gamma) {
        const auto& g = *params.td.gamma;
        if (!(g.theta < params.T1)) throw std::invalid_argument("E[exp(T_d/T1)] diverges for theta >= T1");
        E_inv = std::isfinite(params.T1) ? std::exp(-g.k * std::log1p(-g.theta / params.T1)) : 1.0;
    } else {
        E_inv = 1.0 / survival(params.td.fixed, params.T1);
    }
    // P(M2 = 1 | S1 = s, L = l)
    double p_m2[2][2];
    p_m2[0][0] = e;
    p_m2[1][0] = e + A * decayT;
    p_m2[0][1] = e + A * decayT * E_inv;
    p_m2[1][1] = e + A * decayT * (E_inv - 1);

    ForwardResult r;
    r.stats.pm1 = params.pm1;
    r.stats.t_r = params.t_r;
    auto ps = state_distribution(params.pm1, params.q);
    r.stats.p_m2_given_l0 = ps[0] * p_m2[0][0] + ps[1] * p_m2[1][0];
    r.stats.p_m2_given_l1 = ps[0] * p_m2[0][1] + ps[1] * p_m2[1][1];
    for (int l = 0; l < 2; ++l) {
        double match = 0;
        for (int m1 = 0; m1 < 2; ++m1) {
            double pm2_one = params.q.q[0][m1] * p_m2[0][l] + params.q.q[1][m1] * p_m2[1][l];
            match += params.pm1[m1] * (m1 ? pm2_one : 1 - pm2_one);
        }
        (l ? r.match_given_l1 : r.match_given_l0) = match;
    }
    return r;
}

namespace {

std::vector<double> reference_times(const ForwardParams& params, const ReferenceConfig& config) {
    if (!config.t1_times.empty()) return config.t1_times;
    std::vector<double> t(26);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = 4 * params.T1 * static_cast<double>(i) / 25;
    return t;
}

double double_column(const ForwardParams& params, const DecayFit& truth, int j) {
    return params.pms.p10() * params.q.q[0][j] + truth(params.t_r) * params.q.q[1][j];
}

std::size_t binomial(Rng& rng, std::size_t n, double p) {
    if (n == 0) return 0;
    return std::binomial_distribution<std::size_t>(n, std::clamp(p, 0.0, 1.0))(rng);
}

}  // namespace

ReferenceData expected_reference(const ForwardParams& params, const ReferenceConfig& config) {
    validate_forward(params);
    DecayFit truth = true_decay(params);
    ReferenceData ref;
    ref.t = reference_times(params, config);
    for (double t : ref.t) ref.p.push_back(truth(t));
    ref.t_shots.assign(ref.t.size(), 0);
    ref.pms = params.pms;
    ref.t_r = params.t_r;
    for (int j = 0; j < 2; ++j) {
        double d1 = double_column(params, truth, j);
        ref.double_stats[1][j] = d1;
        ref.double_stats[0][j] = 1 - d1;
    }
    return ref;
}

ReferenceData simulate_reference(const ForwardParams& params, const ReferenceConfig& config, std::uint64_t seed) {
    ReferenceData ref = expected_reference(params, config);
    Rng rng = stream_rng(seed, 0);
    for (std::size_t i = 0; i < ref.t.size(); ++i) {
        ref.t_shots[i] = config.t1_shots_per_point;
        ref.p[i] = static_cast<double>(binomial(rng, ref.t_shots[i], ref.p[i])) / static_cast<double>(ref.t_shots[i]);
    }
    for (int j = 0; j < 2; ++j) {
        ref.pms_shots[j] = config.confusion_shots;
        double p1 = static_cast<double>(binomial(rng, config.confusion_shots, params.pms.p[1][j])) /
                    static_cast<double>(config.confusion_shots);
        ref.pms.p[1][j] = p1;
        ref.pms.p[0][j] = 1 - p1;
    }
    std::size_t n1 = binomial(rng, config.double_shots, params.pm1_double[1]);
    ref.double_shots = {config.double_shots - n1, n1};
    for (int j = 0; j < 2; ++j) {
        if (ref.double_shots[j] == 0) throw std::invalid_argument("double-measurement reference has an empty column");
        double d1 = static_cast<double>(binomial(rng, ref.double_shots[j], ref.double_stats[1][j])) /
                    static_cast<double>(ref.double_shots[j]);
        ref.double_stats[1][j] = d1;
        ref.double_stats[0][j] = 1 - d1;
    }
    return ref;
}

ChainResult run_chain(const ReferenceData& ref, const FeedbackStats& stats) {
    ChainResult c;
    c.decay = fit_exponential(ref.t, ref.p);
    c.q = solve_post_measurement(ref.pms, ref.double_stats, ref.t_r, c.decay);
    c.ps1 = state_distribution(stats.pm1, c.q);
    c.total_time = recover_total_time(stats, ref.pms, c.q, c.decay);
    c.delay = recover_delay(stats, ref.pms, c.q, c.decay, c.total_time);
    return c;
}

namespace {

double redraw(Rng& rng, std::size_t n, double p) {
    return n ? static_cast<double>(binomial(rng, n, p)) / static_cast<double>(n) : p;
}

struct Summary {
    double se, lo, hi;
};

Summary summarize(std::vector<double> v) {
    if (v.size() < 2) return {0, 0, 0};
    double mean = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    std::sort(v.begin(), v.end());
    auto pct = [&](double q) {
        double pos = q * static_cast<double>(v.size() - 1);
        auto lo = static_cast<std::size_t>(pos);
        auto hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
    };
    return {std::sqrt(ss / static_cast<double>(v.size() - 1)), pct(0.025), pct(0.975)};
}

}  // namespace

BootstrapResult bootstrap_chain(const ReferenceData& ref, const FeedbackStats& stats, std::size_t replicates,
                                std::uint64_t seed) {
    BootstrapResult out;
    out.point = run_chain(ref, stats);
    out.replicates = replicates;
    std::vector<double> tds, Ts;
    for (std::size_t b = 0; b < replicates; ++b) {
        Rng rng = stream_rng(seed, b);
        ReferenceData r = ref;
        for (std::size_t i = 0; i < r.t.size(); ++i) r.p[i] = redraw(rng, r.t_shots[i], r.p[i]);
        for (int j = 0; j < 2; ++j) {
            r.pms.p[1][j] = redraw(rng, r.pms_shots[j], r.pms.p[1][j]);
            r.pms.p[0][j] = 1 - r.pms.p[1][j];
            r.double_stats[1][j] = redraw(rng, r.double_shots[j], r.double_stats[1][j]);
            r.double_stats[0][j] = 1 - r.double_stats[1][j];
        }
        FeedbackStats s = stats;
        s.pm1[1] = redraw(rng, s.shots, s.pm1[1]);
        s.pm1[0] = 1 - s.pm1[1];
        s.p_m2_given_l0 = redraw(rng, s.shots_l0, s.p_m2_given_l0);
        s.p_m2_given_l1 = redraw(rng, s.shots_l1, s.p_m2_given_l1);
        try {
            ChainResult c = run_chain(r, s);
            tds.push_back(c.delay.td);
            Ts.push_back(c.total_time);
        } catch (const std::exception&) {
            ++out.failures;
        }
    }
    Summary td = summarize(tds), T = summarize(Ts);
    out.td_se = td.se;
    out.td_lo = td.lo;
    out.td_hi = td.hi;
    out.T_se = T.se;
    out.T_lo = T.lo;
    out.T_hi = T.hi;
    return out;
}

void write_reference_csv(std::ostream& out, const ReferenceData& ref, const FeedbackStats& stats) {
    auto f = [](double v) { return format_double(v); };
    out << "kind,v0,v1,v2,v3,v4,v5,v6,v7\n";
    for (std::size_t i = 0; i < ref.t.size(); ++i) {
        out << "t1," << f(ref.t[i]) << ',' << f(ref.p[i]) << ',' << ref.t_shots[i] << '\n';
    }
    const auto& p = ref.pms.p;
    out << "confusion," << f(p[0][0]) << ',' << f(p[0][1]) << ',' << f(p[1][0]) << ',' << f(p[1][1]) << ','
        << ref.pms_shots[0] << ',' << ref.pms_shots[1] << '\n';
    const auto& d = ref.double_stats;
    out << "double," << f(d[0][0]) << ',' << f(d[0][1]) << ',' << f(d[1][0]) << ',' << f(d[1][1]) << ','
        << ref.double_shots[0] << ',' << ref.double_shots[1] << ',' << f(ref.t_r) << '\n';
    out << "feedback," << f(stats.pm1[0]) << ',' << f(stats.pm1[1]) << ',' << f(stats.p_m2_given_l0) << ','
        << f(stats.p_m2_given_l1) << ',' << stats.shots << ',' << stats.shots_l0 << ',' << stats.shots_l1 << ','
        << f(stats.t_r) << '\n';
}

std::pair<ReferenceData, FeedbackStats> read_reference_csv(std::istream& in) {
    ReferenceData ref;
    FeedbackStats stats;
    std::string line;
    std::size_t lineno = 0;
    bool have_conf = false, have_double = false, have_feedback = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#' || line.rfind("kind,", 0) == 0) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        auto num = [&](std::size_t i) {
            if (i >= cells.size()) throw std::invalid_argument("reference CSV line " + std::to_string(lineno) + ": missing field");
            try {
                return std::stod(cells[i]);
            } catch (const std::exception&) {
                throw std::invalid_argument("reference CSV line " + std::to_string(lineno) + ": bad number '" + cells[i] + "'");
            }
        };
        auto count = [&](std::size_t i) { return static_cast<std::size_t>(num(i)); };
        const std::string& kind = cells.at(0);
        if (kind == "t1") {
            ref.t.push_back(num(1));
            ref.p.push_back(num(2));
            ref.t_shots.push_back(cells.size() > 3 ? count(3) : 0);
        } else if (kind == "confusion") {
            ref.pms.p = {{{num(1), num(2)}, {num(3), num(4)}}};
            ref.pms_shots = {cells.size() > 5 ? count(5) : 0, cells.size() > 6 ? count(6) : 0};
            have_conf = true;
        } else if (kind == "double") {
            ref.double_stats = {{{num(1), num(2)}, {num(3), num(4)}}};
            ref.double_shots = {cells.size() > 5 ? count(5) : 0, cells.size() > 6 ? count(6) : 0};
            if (cells.size() > 7) ref.t_r = num(7);
            have_double = true;
        } else if (kind == "feedback") {
            stats.pm1 = {num(1), num(2)};
            stats.p_m2_given_l0 = num(3);
            stats.p_m2_given_l1 = num(4);
            if (cells.size() > 7) {
                stats.shots = count(5);
                stats.shots_l0 = count(6);
                stats.shots_l1 = count(7);
            }
            if (cells.size() > 8) stats.t_r = num(8);
            have_feedback = true;
        } else {
            throw std::invalid_argument("reference CSV line " + std::to_string(lineno) + ": unknown kind '" + kind + "'");
        }
    }
    if (!have_conf || !have_double || !have_feedback || ref.t.empty()) {
        throw std::invalid_argument("reference CSV needs t1, confusion, double and feedback rows");
    }
    return {ref, stats};
}

std::string bootstrap_json(const BootstrapResult& r) {
    nlohmann::ordered_json j;
    const auto& c = r.point;
    j["decay"] = {{"A", c.decay.A}, {"T1_us", c.decay.T1}, {"B", c.decay.B}, {"rms", c.decay.rms}};
    j["post_measurement"] = {{c.q.q[0][0], c.q.q[0][1]}, {c.q.q[1][0], c.q.q[1][1]}};
    j["post_measurement_clamp"] = c.q.clamp;
    j["p_s1"] = {c.ps1[0], c.ps1[1]};
    j["total_time_us"] = {{"estimate", c.total_time}, {"se", r.T_se}, {"ci95", {r.T_lo, r.T_hi}}};
    j["alpha_d"] = c.delay.alpha;
    j["delay_us"] = {{"estimate", c.delay.td}, {"se", r.td_se}, {"ci95", {r.td_lo, r.td_hi}}};
    j["ambiguous"] = c.delay.ambiguous;
    if (c.delay.alternate_td) j["alternate_delay_us"] = *c.delay.alternate_td;
    j["bootstrap"] = {{"replicates", r.replicates}, {"failures", r.failures}};
    return j.dump(2);
}

}  // namespace rtqec
