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

#include "rtqec/sampler.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <boost/math/distributions/normal.hpp>

#include "rtqec/parallel.hpp"
#include "rtqec/rng.hpp"

namespace rtqec {

std::vector<std::uint32_t> ShotRecord::defects() const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < detectors.size(); ++i) {
        if (detectors[i]) out.push_back(i);
    }
    return out;
}

IQModel IQModel::from_assignment_error(double error) {
    if (!(error > 0 && error < 0.5)) {
        throw std::invalid_argument("assignment error must lie in (0, 0.5)");
    }
    double half = -boost::math::quantile(boost::math::normal(), error);
    IQModel m;
    m.means[0] = Eigen::Vector2d(-half, 0);
    m.means[1] = Eigen::Vector2d(half, 0);
    return m;
}

double IQModel::assignment_error() const {
    validate();
    Eigen::Vector2d diff = means[1] - means[0];
    double mahalanobis = std::sqrt(diff.dot(covariance.ldlt().solve(diff)));
    if (mahalanobis == 0) return 0.5;
    return boost::math::cdf(boost::math::normal(), -mahalanobis / 2);
}

void IQModel::validate() const {
    if (!covariance.allFinite() || std::abs(covariance(0, 1) - covariance(1, 0)) > 1e-12 * covariance.norm() ||
        covariance(0, 0) <= 0 || covariance.determinant() <= 0) {
        throw std::invalid_argument("IQ covariance must be symmetric positive definite");
    }
}

std::uint8_t IQModel::hard_bit(const IQPoint& z) const {
    Eigen::Vector2d x(z[0], z[1]);
    Eigen::Vector2d diff = means[1] - means[0];
    Eigen::Vector2d mid = (means[0] + means[1]) / 2;
    double llr = (covariance.ldlt().solve(diff)).dot(x - mid);
    return llr > 0 ? 1 : 0;
}

ReferenceOutcomes ReferenceOutcomes::draw(const Circuit& circuit, std::uint64_t seed) {
    Rng rng(splitmix64(seed ^ 0x5bd1e995ULL));
    ReferenceOutcomes ref;
    std::uint8_t parity = 0;
    for (std::size_t a = 0; a + 1 < kNumAncilla; ++a) {
        ref.collapse[a] = static_cast<std::uint8_t>(rng() & 1);
        parity ^= ref.collapse[a];
    }
    ref.collapse[kNumAncilla - 1] = parity;

    // Data Z values consistent with every collapsed stabilizer: walk supports from data 0.
    const auto& supports = circuit.layout().supports;
    std::array<bool, kNumData> known{};
    ref.final_data[0] = static_cast<std::uint8_t>(rng() & 1);
    known[0] = true;
    for (std::size_t pass = 0; pass < kNumData; ++pass) {
        for (std::size_t a = 0; a < kNumAncilla; ++a) {
            auto [d0, d1] = supports[a];
            if (known[d0] && !known[d1]) {
                ref.final_data[d1] = ref.final_data[d0] ^ ref.collapse[a];
                known[d1] = true;
            } else if (known[d1] && !known[d0]) {
                ref.final_data[d0] = ref.final_data[d1] ^ ref.collapse[a];
                known[d0] = true;
            }
        }
    }
    return ref;
}

std::uint8_t ReferenceOutcomes::measurement(const Circuit& circuit, std::size_t record) const {
    const MeasurementInfo& info = circuit.measurements()[record];
    if (info.qubit >= kNumData) {
        // Without resets the ancilla toggles: it holds the collapsed value after odd rounds.
        return info.round % 2 == 1 ? collapse[info.qubit - kNumData] : 0;
    }
    return final_data[info.qubit];
}

namespace {

struct ShotPlan {
    std::vector<NoiseChannel> channels;
    std::vector<std::size_t> channel_begin;  // per layer, into channels
};

ShotPlan make_plan(const Circuit& circuit, const NoiseModel& noise, bool drop_measurement_flips) {
    ShotPlan plan;
    for (auto& ch : noise_channels(circuit, noise)) {
        if (drop_measurement_flips && ch.kind == ChannelKind::MeasurementFlip) continue;
        plan.channels.push_back(ch);
    }
    plan.channel_begin.assign(circuit.layers().size() + 1, plan.channels.size());
    for (std::size_t i = plan.channels.size(); i-- > 0;) plan.channel_begin[plan.channels[i].layer] = i;
    for (std::size_t li = circuit.layers().size(); li-- > 0;) {
        plan.channel_begin[li] = std::min(plan.channel_begin[li], plan.channel_begin[li + 1]);
    }
    return plan;
}

void finish_record(const Circuit& circuit, ShotRecord& shot) {
    shot.detectors = detector_values(shot.measurements, circuit.rounds());
    shot.observable_flip_truth = observable_value(shot.measurements, circuit.rounds());
}

IQPoint draw_iq(const IQModel& iq, const Eigen::Matrix2d& chol, std::uint8_t state, Rng& rng) {
    std::normal_distribution<double> gauss;
    Eigen::Vector2d n(gauss(rng), gauss(rng));
    Eigen::Vector2d z = iq.means[state] + chol * n;
    return {static_cast<float>(z[0]), static_cast<float>(z[1])};
}

ShotRecord run_shot(const Circuit& circuit, const ShotPlan& plan, std::uint64_t seed, const IQModel* iq) {
    Rng rng(splitmix64(seed));
    const auto ref = ReferenceOutcomes::draw(circuit, seed);
    Eigen::Matrix2d chol;
    if (iq) chol = iq->covariance.llt().matrixL();

    ShotRecord shot;
    shot.measurements.resize(circuit.num_measurements());
    if (iq) shot.soft.resize(circuit.num_measurements());
    PauliFrame frame;
    std::size_t record = 0;
    const auto& layers = circuit.layers();
    for (std::size_t li = 0; li < layers.size(); ++li) {
        const Layer& layer = layers[li];
        if (layer.kind == LayerKind::Measure) {
            for (auto q : layer.qubits) {
                std::uint8_t bit = ref.measurement(circuit, record) ^ (frame.flips_measurement(q) ? 1 : 0);
                if (iq) {
                    shot.soft[record] = draw_iq(*iq, chol, bit, rng);
                    bit = iq->hard_bit(shot.soft[record]);
                }
                shot.measurements[record++] = bit;
            }
        } else {
            apply_layer(layer, frame);
        }
        for (std::size_t ci = plan.channel_begin[li]; ci < plan.channel_begin[li + 1]; ++ci) {
            const NoiseChannel& ch = plan.channels[ci];
            double u = uniform01(rng);
            if (u >= ch.probability) continue;
            if (ch.kind == ChannelKind::MeasurementFlip) {
                shot.measurements[ch.measurement] ^= 1;
            } else {
                auto term = static_cast<std::size_t>(u / ch.probability * static_cast<double>(ch.num_terms()));
                apply_channel_term(ch, std::min(term, ch.num_terms() - 1), frame);
            }
        }
    }
    finish_record(circuit, shot);
    return shot;
}

}  // namespace

ShotRecord sample_shot(const Circuit& circuit, const NoiseModel& noise, std::uint64_t seed) {
    return run_shot(circuit, make_plan(circuit, noise, false), seed, nullptr);
}

ShotRecord sample_soft_shot(const Circuit& circuit, const NoiseModel& noise, const IQModel& iq, std::uint64_t seed) {
    iq.validate();
    return run_shot(circuit, make_plan(circuit, noise, true), seed, &iq);
}

std::vector<ShotRecord> sample_batch(const Circuit& circuit, const NoiseModel& noise, std::size_t shots,
                                     std::uint64_t seed, std::size_t threads, const std::optional<IQModel>& iq) {
    if (iq) iq->validate();
    const ShotPlan plan = make_plan(circuit, noise, iq.has_value());
    std::vector<ShotRecord> out(shots);
    parallel_for(shots, threads, [&](std::size_t i) {
        out[i] = run_shot(circuit, plan, stream_seed(seed, i), iq ? &*iq : nullptr);
    });
    return out;
}

ShotRecord simulate_with_faults(const Circuit& circuit, std::span<const NoiseChannel> channels,
                                std::span<const InjectedFault> faults, std::uint64_t seed) {
    const auto ref = ReferenceOutcomes::draw(circuit, seed);
    ShotRecord shot;
    shot.measurements.resize(circuit.num_measurements());
    PauliFrame frame;
    std::size_t record = 0;
    const auto& layers = circuit.layers();
    for (std::size_t li = 0; li < layers.size(); ++li) {
        const Layer& layer = layers[li];
        if (layer.kind == LayerKind::Measure) {
            for (auto q : layer.qubits) {
                shot.measurements[record] = ref.measurement(circuit, record) ^ (frame.flips_measurement(q) ? 1 : 0);
                ++record;
            }
        } else {
            apply_layer(layer, frame);
        }
        for (const auto& f : faults) {
            const NoiseChannel& ch = channels[f.channel];
            if (ch.layer != li) continue;
            if (ch.kind == ChannelKind::MeasurementFlip) {
                shot.measurements[ch.measurement] ^= 1;
            } else {
                apply_channel_term(ch, f.term, frame);
            }
        }
    }
    finish_record(circuit, shot);
    return shot;
}

std::string bits_to_hex(std::span<const std::uint8_t> bits) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out((bits.size() + 3) / 4, '0');
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] & 1) {
            int v = (out[i / 4] <= '9') ? out[i / 4] - '0' : out[i / 4] - 'a' + 10;
            out[i / 4] = digits[v | (1 << (i % 4))];
        }
    }
    return out;
}

std::vector<std::uint8_t> hex_to_bits(const std::string& hex, std::size_t num_bits) {
    if (hex.size() != (num_bits + 3) / 4) {
        throw std::invalid_argument("hex field has " + std::to_string(hex.size()) + " digits, expected " +
                                    std::to_string((num_bits + 3) / 4));
    }
    std::vector<std::uint8_t> bits(num_bits);
    for (std::size_t k = 0; k < hex.size(); ++k) {
        char c = hex[k];
        int v;
        if (c >= '0' && c <= '9') {
            v = c - '0';
        } else if (c >= 'a' && c <= 'f') {
            v = c - 'a' + 10;
        } else if (c >= 'A' && c <= 'F') {
            v = c - 'A' + 10;
        } else {
            throw std::invalid_argument(std::string("invalid hex digit '") + c + "'");
        }
        for (int b = 0; b < 4; ++b) {
            std::size_t i = 4 * k + static_cast<std::size_t>(b);
            if (i < num_bits) {
                bits[i] = static_cast<std::uint8_t>(v >> b & 1);
            } else if (v >> b & 1) {
                throw std::invalid_argument("hex field sets bits beyond its declared length");
            }
        }
    }
    return bits;
}

void write_shots_csv(std::ostream& out, std::span<const ShotRecord> shots, const std::string& provenance) {
    std::size_t nm = shots.empty() ? 0 : shots[0].measurements.size();
    std::size_t nd = shots.empty() ? 0 : shots[0].detectors.size();
    if (!provenance.empty()) out << "# " << provenance << '\n';
    out << "# measurements=" << nm << " detectors=" << nd << '\n';
    out << "shot_id,measurements,detectors,truth\n";
    for (std::size_t i = 0; i < shots.size(); ++i) {
        out << i << ',' << bits_to_hex(shots[i].measurements) << ',' << bits_to_hex(shots[i].detectors) << ','
            << int(shots[i].observable_flip_truth) << '\n';
    }
}

std::vector<ShotRecord> read_shots_csv(std::istream& in) {
    std::size_t nm = 0, nd = 0;
    bool have_sizes = false;
    std::vector<ShotRecord> shots;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (std::sscanf(line.c_str(), "# measurements=%zu detectors=%zu", &nm, &nd) == 2) have_sizes = true;
            continue;
        }
        if (line.rfind("shot_id", 0) == 0) continue;
        if (!have_sizes) throw std::invalid_argument("shots CSV lacks the '# measurements=N detectors=M' header");
        std::stringstream ls(line);
        std::string id, m, d, t;
        if (!std::getline(ls, id, ',') || !std::getline(ls, m, ',') || !std::getline(ls, d, ',') ||
            !std::getline(ls, t, ',')) {
            throw std::invalid_argument("malformed shots CSV row: " + line);
        }
        ShotRecord shot;
        shot.measurements = hex_to_bits(m, nm);
        shot.detectors = hex_to_bits(d, nd);
        shot.observable_flip_truth = static_cast<std::uint8_t>(std::stoi(t) != 0);
        shots.push_back(std::move(shot));
    }
    return shots;
}

namespace {

void put_f32(std::ostream& out, float v) {
    std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
    char bytes[4];
    for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>(bits >> (8 * i) & 0xff);
    out.write(bytes, 4);
}

bool get_f32(std::istream& in, float& v) {
    unsigned char bytes[4];
    if (!in.read(reinterpret_cast<char*>(bytes), 4)) return false;
    std::uint32_t bits = 0;
    for (int i = 0; i < 4; ++i) bits |= std::uint32_t(bytes[i]) << (8 * i);
    v = std::bit_cast<float>(bits);
    return true;
}

}  // namespace

void write_soft_sidecar(std::ostream& out, std::span<const ShotRecord> shots) {
    for (const auto& shot : shots) {
        if (shot.soft.size() != shot.measurements.size()) {
            throw std::invalid_argument("write_soft_sidecar: shot without soft values");
        }
        write_iq_points(out, shot.soft);
    }
}

void read_soft_sidecar(std::istream& in, std::span<ShotRecord> shots) {
    for (auto& shot : shots) {
        shot.soft.resize(shot.measurements.size());
        for (auto& z : shot.soft) {
            if (!get_f32(in, z[0]) || !get_f32(in, z[1])) {
                throw std::invalid_argument("soft sidecar is shorter than the shot record");
            }
        }
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw std::invalid_argument("soft sidecar is longer than the shot record");
    }
}

void write_iq_points(std::ostream& out, std::span<const IQPoint> points) {
    for (const auto& z : points) {
        put_f32(out, z[0]);
        put_f32(out, z[1]);
    }
}

std::vector<IQPoint> read_iq_points(std::istream& in) {
    std::vector<IQPoint> out;
    IQPoint z;
    while (get_f32(in, z[0])) {
        if (!get_f32(in, z[1])) throw std::invalid_argument("IQ file has a dangling I value");
        out.push_back(z);
    }
    return out;
}

}  // namespace rtqec
