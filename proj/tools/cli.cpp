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

#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rtqec/calibration.hpp"
#include "rtqec/circuit.hpp"
#include "rtqec/decoders.hpp"
#include "rtqec/graph.hpp"
#include "rtqec/noise.hpp"
#include "rtqec/parallel.hpp"
#include "rtqec/realtime.hpp"
#include "rtqec/reset_physics.hpp"
#include "rtqec/rng.hpp"
#include "rtqec/sampler.hpp"
#include "rtqec/t1_clock.hpp"
#include "rtqec/text.hpp"

#ifndef RTQEC_VERSION
#define RTQEC_VERSION "0.0.0"
#endif

namespace rtqec::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {"sample",   "decode",   "sweep-rounds", "soft-compare",
                                                   "calibrate", "realtime", "t1clock",      "reset-fit"};
    return names;
}

namespace {

std::vector<std::size_t> parse_rounds(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
        if (item.empty()) continue;
        std::size_t pos = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != item.size() || item[0] == '-') throw ConfigError("rounds", "'" + item + "' is not a round count");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

std::string join_rounds(const std::vector<std::size_t>& rounds) {
    std::string s;
    for (auto r : rounds) s += (s.empty() ? "" : ",") + std::to_string(r);
    return s;
}

}  // namespace

bool parse_args(int argc, const char* const* argv, RunConfig& config, std::ostream& out) {
    CLI::App app{"Stability-experiment decoding, timing and calibration toolkit", "rtqec"};
    app.set_version_flag("--version", RTQEC_VERSION);
    app.set_config("--config", "", "key = value file; command-line flags take precedence");
    std::string rounds_text;

    app.add_option("experiment", config.experiment, "sample | decode | sweep-rounds | soft-compare | calibrate | "
                                                     "realtime | t1clock | reset-fit")
        ->required();
    app.add_option("--rounds", rounds_text, "Comma-separated detector-round counts, e.g. 5,9,13");
    app.add_option("--shots", config.shots, "Shots per configuration");
    app.add_option("--p", config.p, "Physical error rate of the circuit noise model");
    app.add_option("--seed", config.seed, "Master seed");
    app.add_option("--decoder", config.decoder, "mwpm | clustering | soft-mwpm");
    app.add_option("--out", config.out, "Output directory");
    app.add_option("--threads", config.threads, "Worker threads (0 = all cores)");

    app.add_flag("--soft", config.soft, "Sample soft (IQ) readout");
    app.add_option("--iq-error", config.iq_error, "Assignment error of the IQ readout model");
    app.add_option("--calibration-shots", config.calibration_shots, "IQ calibration shots per state");
    app.add_option("--input", config.input, "Input shots CSV (decode) or two-tone map CSV (reset-fit) or "
                                            "reference CSV (t1clock)");
    app.add_option("--soft-input", config.soft_input, "Soft readout sidecar matching --input");
    app.add_option("--classifier", config.classifier, "Classifier JSON to use instead of training one");

    app.add_option("--round-us", config.round_us, "Duration of one QEC round");
    app.add_option("--propagation-us", config.propagation_us, "Readout propagation delay");
    app.add_option("--buffer-us", config.buffer_us, "Buffering time per round");
    app.add_option("--control-us", config.control_us, "Control-logic latency");
    app.add_option("--decode-us", config.decode_us, "Full-syndrome decode time");
    app.add_option("--per-round-decode-us", config.per_round_decode_us, "Streaming decode cost per round");
    app.add_option("--gamma-k", config.gamma_k, "Gamma shape for per-round decode cost or feedback delay");
    app.add_option("--gamma-theta", config.gamma_theta, "Gamma scale (us)");
    app.add_option("--stream-rounds", config.stream_rounds, "Rounds in the streaming simulation");
    app.add_option("--window", config.window, "Rounds per decode window");

    app.add_option("--td-us", config.td_us, "True feedback delay");
    app.add_option("--total-time-us", config.total_time_us, "Gap between the two measurements");
    app.add_option("--t1-us", config.t1_us, "Qubit T1");
    app.add_option("--decay-a", config.decay_a, "Decay amplitude A");
    app.add_option("--decay-b", config.decay_b, "Decay floor B");
    app.add_option("--bootstrap", config.bootstrap, "Bootstrap replicates");

    app.add_option("--chi-mhz", config.chi_mhz, "Dispersive shift chi/2pi");
    app.add_option("--kappa-mhz", config.kappa_mhz, "Resonator linewidth kappa/2pi");
    app.add_option("--n0", config.n0, "Peak photon number");
    app.add_option("--probe-linewidth-mhz", config.probe_linewidth_mhz, "Qubit probe linewidth");
    app.add_option("--noise-sd", config.noise_sd, "Additive noise on the two-tone map");
    app.add_option("--reset-a", config.reset_a, "Reset steady-state population");
    app.add_option("--reset-b", config.reset_b, "Reset decay amplitude");
    app.add_option("--reset-t-us", config.reset_t_us, "Reset decay constant");
    app.add_option("--reset-shots", config.reset_shots, "Shots per reset-decay point");
    app.add_option("--decay-input", config.decay_input, "Reset-decay CSV (tau_us,population)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return false;
    } catch (const CLI::CallForVersion&) {
        out << RTQEC_VERSION << '\n';
        return false;
    } catch (const CLI::ParseError& e) {
        throw ConfigError("arguments", e.what());
    }
    if (app.count("--rounds") || !rounds_text.empty()) config.rounds = parse_rounds(rounds_text);
    return true;
}

void validate(const RunConfig& c) {
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), c.experiment) == names.end()) {
        throw ConfigError("experiment", "unknown experiment '" + c.experiment + "'");
    }
    if (c.shots < 1) throw ConfigError("shots", "must be >= 1");
    if (!(c.p >= 0 && c.p < 0.5)) throw ConfigError("p", "must lie in [0, 0.5)");
    if (c.decoder != "mwpm" && c.decoder != "clustering" && c.decoder != "soft-mwpm") {
        throw ConfigError("decoder", "expected mwpm, clustering or soft-mwpm, got '" + c.decoder + "'");
    }
    if (c.out.empty()) throw ConfigError("out", "output directory is empty");

    const bool decoding = c.experiment == "sample" || c.experiment == "decode" || c.experiment == "sweep-rounds" ||
                          c.experiment == "soft-compare" || c.experiment == "calibrate";
    const bool rounds_from_input = c.experiment == "decode" && !c.input.empty();
    if ((decoding && !rounds_from_input) || c.experiment == "realtime") {
        if (c.rounds.empty()) throw ConfigError("rounds", "list is empty");
    }
    for (auto r : c.rounds) {
        if (decoding && r < 2) throw ConfigError("rounds", "decoding runs need at least 2 detector rounds");
        if (r < 1) throw ConfigError("rounds", "entries must be >= 1");
    }
    if (!(c.iq_error > 0 && c.iq_error < 0.5)) throw ConfigError("iq-error", "must lie in (0, 0.5)");
    if (c.experiment == "soft-compare" || c.decoder == "soft-mwpm") {
        if (c.calibration_shots < 2 && c.classifier.empty()) throw ConfigError("calibration-shots", "must be >= 2");
    }
    if (c.experiment == "decode" && c.decoder == "soft-mwpm" && !c.input.empty() && c.soft_input.empty()) {
        throw ConfigError("soft-input", "soft-mwpm on recorded shots needs the soft readout sidecar");
    }
    if (c.experiment == "calibrate" && c.shots < 10000) throw ConfigError("shots", "calibration needs >= 10000 shots");
    for (auto [name, v] : {std::pair{"round-us", c.round_us}, {"propagation-us", c.propagation_us},
                           {"buffer-us", c.buffer_us}, {"control-us", c.control_us}, {"decode-us", c.decode_us},
                           {"per-round-decode-us", c.per_round_decode_us}}) {
        if (!(v >= 0) || !std::isfinite(v)) throw ConfigError(name, "must be >= 0");
    }
    if (c.gamma_k < 0 || c.gamma_theta < 0) throw ConfigError("gamma-k", "Gamma parameters must be >= 0");
    if (c.gamma_k > 0 && !(c.gamma_theta > 0)) throw ConfigError("gamma-theta", "must be > 0 when gamma-k is set");
    if (c.window < 1) throw ConfigError("window", "must be >= 1");
    if (!(c.t1_us > 0)) throw ConfigError("t1-us", "must be > 0");
    if (!(c.decay_a > 0) || c.decay_b < 0 || c.decay_a + c.decay_b > 1) {
        throw ConfigError("decay-a", "need A > 0, B >= 0 and A + B <= 1");
    }
    if (!(c.td_us >= 0) || !(c.total_time_us > c.td_us)) {
        throw ConfigError("total-time-us", "must exceed td-us, which must be >= 0");
    }
    if (c.chi_mhz == 0) throw ConfigError("chi-mhz", "must be nonzero");
    if (!(c.kappa_mhz > 0)) throw ConfigError("kappa-mhz", "must be > 0");
    if (!(c.n0 > 0)) throw ConfigError("n0", "must be > 0");
    if (!(c.probe_linewidth_mhz > 0)) throw ConfigError("probe-linewidth-mhz", "must be > 0");
    if (!(c.noise_sd >= 0)) throw ConfigError("noise-sd", "must be >= 0");
    if (!(c.reset_t_us > 0)) throw ConfigError("reset-t-us", "must be > 0");
    if (c.reset_shots < 1) throw ConfigError("reset-shots", "must be >= 1");
}

std::string canonical_config(const RunConfig& c) {
    std::ostringstream s;
    auto kv = [&](const char* k, const auto& v) { s << k << '=' << v << '\n'; };
    auto kd = [&](const char* k, double v) { s << k << '=' << format_double(v) << '\n'; };
    kv("experiment", c.experiment);
    kv("rounds", join_rounds(c.rounds));
    kv("shots", c.shots);
    kd("p", c.p);
    kv("seed", c.seed);
    kv("decoder", c.decoder);
    kv("soft", c.soft ? 1 : 0);
    kd("iq_error", c.iq_error);
    kv("calibration_shots", c.calibration_shots);
    kd("round_us", c.round_us);
    kd("propagation_us", c.propagation_us);
    kd("buffer_us", c.buffer_us);
    kd("control_us", c.control_us);
    kd("decode_us", c.decode_us);
    kd("per_round_decode_us", c.per_round_decode_us);
    kd("gamma_k", c.gamma_k);
    kd("gamma_theta", c.gamma_theta);
    kv("stream_rounds", c.stream_rounds);
    kv("window", c.window);
    kd("td_us", c.td_us);
    kd("total_time_us", c.total_time_us);
    kd("t1_us", c.t1_us);
    kd("decay_a", c.decay_a);
    kd("decay_b", c.decay_b);
    kv("bootstrap", c.bootstrap);
    kd("chi_mhz", c.chi_mhz);
    kd("kappa_mhz", c.kappa_mhz);
    kd("n0", c.n0);
    kd("probe_linewidth_mhz", c.probe_linewidth_mhz);
    kd("noise_sd", c.noise_sd);
    kd("reset_a", c.reset_a);
    kd("reset_b", c.reset_b);
    kd("reset_t_us", c.reset_t_us);
    kv("reset_shots", c.reset_shots);
    // Inputs change results, so their names count; output location and thread count do not.
    kv("input", c.input);
    kv("soft_input", c.soft_input);
    kv("classifier", c.classifier);
    kv("decay_input", c.decay_input);
    return s.str();
}

std::uint64_t config_hash(const RunConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical_config(config)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

struct Context {
    const RunConfig& config;
    std::ostream& log;
    fs::path dir;
    std::string hash_hex;

    std::string provenance() const {
        return "# rtqec " RTQEC_VERSION " experiment=" + config.experiment + " config_hash=" + hash_hex +
               " seed=" + std::to_string(config.seed);
    }
    json provenance_json() const {
        return json{{"tool", "rtqec"},
                    {"version", RTQEC_VERSION},
                    {"experiment", config.experiment},
                    {"config_hash", hash_hex},
                    {"seed", config.seed}};
    }
    std::ofstream open(const std::string& name) const {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
        return f;
    }
    void write_summary(json body) const {
        json j;
        j["provenance"] = provenance_json();
        for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
        auto f = open("summary.json");
        f << j.dump(2) << '\n';
    }
};

struct Rate {
    std::size_t shots = 0;
    std::size_t failures = 0;
    double rate() const { return shots ? static_cast<double>(failures) / static_cast<double>(shots) : 0.0; }
    double stderr_() const { return shots ? std::sqrt(rate() * (1 - rate()) / static_cast<double>(shots)) : 0.0; }
};

std::string fmt(double v) { return format_double(v, 10); }

Circuit circuit_for(std::size_t detector_rounds) { return build_stability8(detector_rounds + 1); }

std::size_t rounds_from_measurements(std::size_t m) {
    if (m < 12 || m % kNumAncilla != 0) {
        throw ConfigError("input", "shot records of " + std::to_string(m) + " measurements fit no stability circuit");
    }
    return m / kNumAncilla - 2;
}

NoiseModel hard_noise(const RunConfig& c) { return NoiseModel::from_p(c.p); }
NoiseModel soft_graph_noise(const RunConfig& c) {
    NoiseModel n = NoiseModel::from_p(c.p);
    n.measurement_flip = c.iq_error;
    return n;
}

Classifier load_or_train_classifier(const RunConfig& c, const IQModel& iq) {
    if (!c.classifier.empty()) {
        std::ifstream f(c.classifier);
        if (!f) throw ConfigError("classifier", "cannot read " + c.classifier);
        std::stringstream ss;
        ss << f.rdbuf();
        return Classifier::from_json(ss.str());
    }
    auto s0 = draw_calibration_shots(iq, 0, c.calibration_shots, stream_seed(c.seed, 0xca110));
    auto s1 = draw_calibration_shots(iq, 1, c.calibration_shots, stream_seed(c.seed, 0xca111));
    return train_classifier(s0, s1);
}

/// Per-shot failure flags; deterministic for any thread count.
std::vector<std::uint8_t> decode_failures(const DecodingGraph& graph, const std::vector<ShotRecord>& shots,
                                          const std::string& decoder, const Classifier* classifier,
                                          std::size_t threads) {
    std::vector<std::uint8_t> fail(shots.size());
    if (decoder == "clustering") {
        ClusteringDecoder dec(graph);
        parallel_for(shots.size(), threads, [&](std::size_t i) {
            auto defects = shots[i].defects();
            fail[i] = dec.decode(defects).logical_flip != shots[i].observable_flip_truth;
        });
        return fail;
    }
    MwpmDecoder dec(graph);
    parallel_for(shots.size(), threads, [&](std::size_t i) {
        auto defects = shots[i].defects();
        DecodeResult r;
        if (decoder == "soft-mwpm") {
            r = dec.decode(defects, apply_soft_weights(graph, shots[i], *classifier));
        } else {
            r = dec.decode(defects);
        }
        fail[i] = r.logical_flip != shots[i].observable_flip_truth;
    });
    return fail;
}

Rate tally(const std::vector<std::uint8_t>& fail) {
    Rate r;
    r.shots = fail.size();
    for (auto f : fail) r.failures += f;
    return r;
}

std::uint64_t rounds_seed(const RunConfig& c, std::size_t rounds) { return stream_seed(c.seed, rounds); }

void write_graph(const Context& ctx, const DecodingGraph& graph) {
    auto f = ctx.open("graph.txt");
    f << "# u v p w obs (v = -1 is the boundary) num_detectors=" << graph.num_detectors() << '\n';
    graph.write_text(f);
}

int run_sample(const Context& ctx) {
    const RunConfig& c = ctx.config;
    std::optional<IQModel> iq;
    if (c.soft) iq = IQModel::from_assignment_error(c.iq_error);
    auto results = ctx.open("results.csv");
    results << ctx.provenance() << '\n' << "rounds,shots,defect_rate,observable_flip_rate\n";
    json rows = json::array();
    for (std::size_t i = 0; i < c.rounds.size(); ++i) {
        std::size_t n = c.rounds[i];
        Circuit circuit = circuit_for(n);
        auto shots = sample_batch(circuit, hard_noise(c), c.shots, rounds_seed(c, n), c.threads, iq);
        std::size_t defects = 0, flips = 0;
        for (const auto& s : shots) {
            for (auto d : s.detectors) defects += d;
            flips += s.observable_flip_truth;
        }
        double defect_rate = static_cast<double>(defects) / static_cast<double>(shots.size() * circuit.num_detectors());
        double flip_rate = static_cast<double>(flips) / static_cast<double>(shots.size());
        results << n << ',' << c.shots << ',' << fmt(defect_rate) << ',' << fmt(flip_rate) << '\n';
        rows.push_back({{"rounds", n}, {"defect_rate", defect_rate}, {"observable_flip_rate", flip_rate}});
        {
            auto f = ctx.open("shots_r" + std::to_string(n) + ".csv");
            write_shots_csv(f, shots, ctx.provenance());
        }
        if (iq) {
            auto f = ctx.open("shots_r" + std::to_string(n) + ".iq");
            write_soft_sidecar(f, shots);
        }
        if (i == 0) write_graph(ctx, build_graph(circuit, iq ? soft_graph_noise(c) : hard_noise(c)));
        ctx.log << "rounds " << n << ": defect rate " << fmt(defect_rate) << ", raw observable flips "
                << fmt(flip_rate) << '\n';
    }
    ctx.write_summary({{"shots", c.shots}, {"soft", c.soft}, {"results", rows}});
    return 0;
}

int run_decode(const Context& ctx) {
    const RunConfig& c = ctx.config;
    const bool soft = c.decoder == "soft-mwpm";
    std::optional<IQModel> iq;
    std::optional<Classifier> classifier;
    if (soft) {
        iq = IQModel::from_assignment_error(c.iq_error);
        classifier = load_or_train_classifier(c, *iq);
    }
    struct Job {
        std::size_t rounds;
        std::vector<ShotRecord> shots;
    };
    std::vector<Job> jobs;
    if (!c.input.empty()) {
        std::ifstream f(c.input);
        if (!f) throw ConfigError("input", "cannot read " + c.input);
        auto shots = read_shots_csv(f);
        if (shots.empty()) throw ConfigError("input", "no shots in " + c.input);
        if (!c.soft_input.empty()) {
            std::ifstream sf(c.soft_input, std::ios::binary);
            if (!sf) throw ConfigError("soft-input", "cannot read " + c.soft_input);
            read_soft_sidecar(sf, shots);
        }
        jobs.push_back({rounds_from_measurements(shots.front().measurements.size()), std::move(shots)});
    } else {
        for (auto n : c.rounds) {
            jobs.push_back({n, sample_batch(circuit_for(n), hard_noise(c), c.shots, rounds_seed(c, n), c.threads, iq)});
        }
    }

    auto results = ctx.open("results.csv");
    results << ctx.provenance() << '\n' << "rounds,shots,failures,logical_error,stderr\n";
    json rows = json::array();
    ctx.log << "decoder " << c.decoder << '\n' << "rounds      shots   logical_error   stderr\n";
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const Job& job = jobs[i];
        Circuit circuit = circuit_for(job.rounds);
        DecodingGraph graph = build_graph(circuit, soft || !c.soft_input.empty() ? soft_graph_noise(c) : hard_noise(c));
        if (i == 0) write_graph(ctx, graph);
        Rate r = tally(decode_failures(graph, job.shots, c.decoder, classifier ? &*classifier : nullptr, c.threads));
        results << job.rounds << ',' << r.shots << ',' << r.failures << ',' << fmt(r.rate()) << ','
                << fmt(r.stderr_()) << '\n';
        rows.push_back({{"rounds", job.rounds},
                        {"shots", r.shots},
                        {"failures", r.failures},
                        {"logical_error", r.rate()},
                        {"stderr", r.stderr_()}});
        char line[128];
        std::snprintf(line, sizeof line, "%6zu %10zu %15.6f %8.6f\n", job.rounds, r.shots, r.rate(), r.stderr_());
        ctx.log << line;
    }
    ctx.write_summary({{"decoder", c.decoder}, {"p", c.p}, {"results", rows}});
    return 0;
}

int run_soft_compare(const Context& ctx) {
    const RunConfig& c = ctx.config;
    IQModel iq = IQModel::from_assignment_error(c.iq_error);
    Classifier classifier = load_or_train_classifier(c, iq);
    auto results = ctx.open("results.csv");
    results << ctx.provenance() << '\n'
            << "rounds,shots,hard_error,hard_stderr,soft_error,soft_stderr,difference,difference_stderr\n";
    json rows = json::array();
    ctx.log << "rounds   hard_error   soft_error   difference (stderr)\n";
    for (std::size_t i = 0; i < c.rounds.size(); ++i) {
        std::size_t n = c.rounds[i];
        Circuit circuit = circuit_for(n);
        auto shots = sample_batch(circuit, hard_noise(c), c.shots, rounds_seed(c, n), c.threads, iq);
        DecodingGraph graph = build_graph(circuit, soft_graph_noise(c));
        if (i == 0) write_graph(ctx, graph);
        auto hard = decode_failures(graph, shots, "mwpm", nullptr, c.threads);
        auto soft = decode_failures(graph, shots, "soft-mwpm", &classifier, c.threads);
        Rate h = tally(hard), s = tally(soft);
        // Paired difference: both decoders see the same shots.
        double mean = 0, sq = 0;
        for (std::size_t k = 0; k < shots.size(); ++k) {
            double d = double(hard[k]) - double(soft[k]);
            mean += d;
            sq += d * d;
        }
        const double nn = static_cast<double>(shots.size());
        mean /= nn;
        double diff_se = nn > 1 ? std::sqrt(std::max(0.0, sq / nn - mean * mean) / (nn - 1)) : 0.0;
        results << n << ',' << c.shots << ',' << fmt(h.rate()) << ',' << fmt(h.stderr_()) << ',' << fmt(s.rate())
                << ',' << fmt(s.stderr_()) << ',' << fmt(mean) << ',' << fmt(diff_se) << '\n';
        rows.push_back({{"rounds", n},
                        {"hard_error", h.rate()},
                        {"soft_error", s.rate()},
                        {"difference", mean},
                        {"difference_stderr", diff_se}});
        char line[160];
        std::snprintf(line, sizeof line, "%6zu %12.6f %12.6f %12.6f (%.6f)\n", n, h.rate(), s.rate(), mean, diff_se);
        ctx.log << line;
    }
    ctx.write_summary({{"iq_error", c.iq_error}, {"classifier", json::parse(classifier.to_json())}, {"results", rows}});
    return 0;
}

int run_calibrate(const Context& ctx) {
    const RunConfig& c = ctx.config;
    std::size_t n = c.rounds.front();
    Circuit circuit = circuit_for(n);
    DecodingGraph model = build_graph(circuit, hard_noise(c));
    auto shots = sample_batch(circuit, hard_noise(c), c.shots, rounds_seed(c, n), c.threads);
    PairwiseAccumulator acc(model);
    for (const auto& s : shots) acc.add(s.detectors);
    PairwiseEstimate est = acc.estimate();

    std::map<std::pair<std::uint32_t, std::uint32_t>, double> model_p;
    for (const auto& e : model.edges()) {
        auto key = e.is_boundary() ? std::make_pair(e.u, kBoundary) : std::make_pair(std::min(e.u, e.v), std::max(e.u, e.v));
        model_p[key] = xor_probability(model_p[key], e.probability);
    }
    auto flag_name = [](EstimateFlag f) {
        return f == EstimateFlag::Ok ? "ok" : f == EstimateFlag::Clamped ? "clamped" : "undefined";
    };
    auto results = ctx.open("results.csv");
    results << ctx.provenance() << '\n' << "u,v,p_model,p_estimate,flag\n";
    double worst_bulk = 0, worst_boundary = 0;
    std::size_t flagged = 0;
    for (const auto& e : est.edges) {
        double pm = model_p[{e.u, e.v}];
        worst_bulk = std::max(worst_bulk, std::abs(pm - e.probability));
        flagged += e.flag != EstimateFlag::Ok;
        results << e.u << ',' << e.v << ',' << fmt(pm) << ',' << fmt(e.probability) << ',' << flag_name(e.flag) << '\n';
    }
    for (std::uint32_t d = 0; d < est.boundary.size(); ++d) {
        auto it = model_p.find({d, kBoundary});
        double pm = it == model_p.end() ? 0.0 : it->second;
        worst_boundary = std::max(worst_boundary, std::abs(pm - est.boundary[d]));
        flagged += est.boundary_flags[d] != EstimateFlag::Ok;
        results << d << ",-1," << fmt(pm) << ',' << fmt(est.boundary[d]) << ',' << flag_name(est.boundary_flags[d])
                << '\n';
    }
    write_graph(ctx, model.with_probabilities(est.edge_probabilities(model)));

    IQModel iq = IQModel::from_assignment_error(c.iq_error);
    Classifier classifier = load_or_train_classifier(c, iq);
    {
        auto f = ctx.open("classifier.json");
        f << classifier.to_json() << '\n';
    }
    ctx.log << "pairwise estimate from " << est.shots << " shots: max |dp| bulk " << fmt(worst_bulk) << ", boundary "
            << fmt(worst_boundary) << ", flagged " << flagged << '\n';
    ctx.write_summary({{"rounds", n},
                       {"shots", est.shots},
                       {"max_abs_error_bulk", worst_bulk},
                       {"max_abs_error_boundary", worst_boundary},
                       {"flagged_estimates", flagged},
                       {"classifier", json::parse(classifier.to_json())}});
    return 0;
}

int run_realtime(const Context& ctx) {
    const RunConfig& c = ctx.config;
    LatencyModel model;
    model.round_time = c.round_us;
    model.readout_propagation = c.propagation_us;
    model.buffer_time = c.buffer_us;
    model.control_logic = c.control_us;
    model.decode_time = DecodeTimeSource::fixed(c.decode_us);

    auto results = ctx.open("results.csv");
    results << ctx.provenance() << '\n'
            << "rounds,decode_us,propagation_us,control_us,latency_us,total_us,run_duration_us\n";
    json rows = json::array();
    for (auto n : c.rounds) {
        ResponseBreakdown b = response_time(model, n);
        double duration = run_duration(model, n);
        results << n << ',' << fmt(b.decode) << ',' << fmt(b.propagation) << ',' << fmt(b.control) << ','
                << fmt(b.latency()) << ',' << fmt(b.total) << ',' << fmt(duration) << '\n';
        rows.push_back(json::parse(breakdown_json(b, n)));
        rows.back()["run_duration_us"] = duration;
        ctx.log << "rounds " << n << '\n' << format_breakdown_table(b);
    }

    LatencyModel stream = model;
    stream.decode_time = c.gamma_k > 0 ? DecodeTimeSource::gamma({c.gamma_k, c.gamma_theta})
                                       : DecodeTimeSource::fixed(c.per_round_decode_us);
    Timeline tl = simulate_stream(stream, c.stream_rounds, c.window, c.seed);
    {
        auto f = ctx.open("timeline.csv");
        write_timeline_csv(f, tl);
    }
    json backlog{{"stream_rounds", c.stream_rounds},
                 {"window_rounds", c.window},
                 {"per_round_decode_mean_us", stream.decode_time.mean()},
                 {"max_queue_depth", tl.max_queue_depth()}};
    try {
        BacklogResult br = detect_backlog(tl);
        backlog["classification"] = br.growing ? "growing" : "bounded";
        backlog["slope"] = br.slope;
        ctx.log << "stream: " << (br.growing ? "growing" : "bounded") << " backlog, slope " << fmt(br.slope)
                << ", max queue " << tl.max_queue_depth() << '\n';
    } catch (const InsufficientDataError& e) {
        backlog["classification"] = "insufficient-data";
        ctx.log << "stream: " << e.what() << '\n';
    }
    ctx.write_summary({{"response", rows}, {"stream", backlog}});
    return 0;
}

ForwardParams forward_params(const RunConfig& c) {
    ForwardParams p;
    if (c.gamma_k > 0) {
        p.td.gamma = GammaFit{c.gamma_k, c.gamma_theta};
    } else {
        p.td.fixed = c.td_us;
    }
    p.T = c.total_time_us;
    p.T1 = c.t1_us;
    p.pms = ConfusionMatrix::from_errors(c.decay_b, 1 - (c.decay_a + c.decay_b));
    p.q = reference_forward_params(0, 0).q;
    return p;
}

int run_t1clock(const Context& ctx) {
    const RunConfig& c = ctx.config;
    ReferenceData ref;
    FeedbackStats stats;
    json truth;
    if (!c.input.empty()) {
        std::ifstream f(c.input);
        if (!f) throw ConfigError("input", "cannot read " + c.input);
        std::tie(ref, stats) = read_reference_csv(f);
    } else {
        ForwardParams p = forward_params(c);
        ReferenceConfig rc;
        rc.confusion_shots = c.shots;
        rc.double_shots = c.shots;
        rc.t1_shots_per_point = std::max<std::size_t>(1, c.shots / 10);
        ref = simulate_reference(p, rc, stream_seed(c.seed, 1));
        ForwardResult fr = forward_simulate(p, c.shots, stream_seed(c.seed, 2), static_cast<unsigned>(c.threads));
        stats = fr.stats;
        truth = {{"td_us", c.gamma_k > 0 ? c.gamma_k * c.gamma_theta : c.td_us},
                 {"total_time_us", c.total_time_us},
                 {"t1_us", c.t1_us},
                 {"match_given_l0", fr.match_given_l0},
                 {"match_given_l1", fr.match_given_l1}};
    }
    {
        auto f = ctx.open("reference.csv");
        f << ctx.provenance() << '\n';
        write_reference_csv(f, ref, stats);
    }
    BootstrapResult br = bootstrap_chain(ref, stats, c.bootstrap, stream_seed(c.seed, 3));
    auto results = ctx.open("results.csv");
    results << ctx.provenance() << '\n' << "quantity,estimate,se,ci_lo,ci_hi\n";
    results << "total_time_us," << fmt(br.point.total_time) << ',' << fmt(br.T_se) << ',' << fmt(br.T_lo) << ','
            << fmt(br.T_hi) << '\n';
    results << "delay_us," << fmt(br.point.delay.td) << ',' << fmt(br.td_se) << ',' << fmt(br.td_lo) << ','
            << fmt(br.td_hi) << '\n';
    ctx.log << "T   = " << fmt(br.point.total_time) << " us (se " << fmt(br.T_se) << ")\n"
            << "T_d = " << fmt(br.point.delay.td) << " us (se " << fmt(br.td_se) << ")"
            << (br.point.delay.ambiguous ? "  [two admissible roots]" : "") << '\n';
    json body = json::parse(bootstrap_json(br));
    if (!truth.is_null()) body["truth"] = truth;
    ctx.write_summary(body);
    return 0;
}

int run_reset_fit(const Context& ctx) {
    const RunConfig& c = ctx.config;
    TwoToneMap map;
    json truth;
    if (!c.input.empty()) {
        std::ifstream f(c.input);
        if (!f) throw ConfigError("input", "cannot read " + c.input);
        map = read_two_tone_csv(f);
    } else {
        DispersiveParams params = DispersiveParams::from_chi(c.chi_mhz, c.kappa_mhz, c.n0);
        std::vector<double> dr, dq;
        double span_r = 4 * (std::abs(c.chi_mhz) + c.kappa_mhz);
        for (int i = -100; i <= 100; ++i) dr.push_back(span_r * i / 100.0);
        double depth = 2 * c.chi_mhz * c.n0;
        double lo = std::min(0.0, depth) - 6 * c.probe_linewidth_mhz;
        double hi = std::max(0.0, depth) + 6 * c.probe_linewidth_mhz;
        double step = c.probe_linewidth_mhz / 10;
        for (double q = lo; q <= hi + 1e-12; q += step) dq.push_back(q);
        map = synth_two_tone(params, dr, dq, c.probe_linewidth_mhz, c.noise_sd, stream_seed(c.seed, 1),
                             static_cast<unsigned>(c.threads));
        truth["chi_mhz"] = c.chi_mhz;
        truth["kappa_mhz"] = c.kappa_mhz;
        truth["n0"] = c.n0;
    }
    {
        auto f = ctx.open("two_tone.csv");
        write_two_tone_csv(f, map);
    }
    TwoToneFit tt = fit_two_tone(map);

    std::vector<double> tau, pop;
    if (!c.decay_input.empty()) {
        std::ifstream f(c.decay_input);
        if (!f) throw ConfigError("decay-input", "cannot read " + c.decay_input);
        std::string line;
        while (std::getline(f, line)) {
            if (line.empty() || line[0] == '#' || !(std::isdigit(line[0]) || line[0] == '.' || line[0] == '-')) continue;
            auto comma = line.find(',');
            if (comma == std::string::npos) throw ConfigError("decay-input", "expected tau_us,population rows");
            tau.push_back(std::stod(line.substr(0, comma)));
            pop.push_back(std::stod(line.substr(comma + 1)));
        }
    } else {
        Rng rng = stream_rng(c.seed, 2);
        for (int i = 0; i <= 20; ++i) {
            double t = 0.1 * i;
            double p = std::clamp(c.reset_a + c.reset_b * std::exp(-t / c.reset_t_us), 0.0, 1.0);
            tau.push_back(t);
            pop.push_back(static_cast<double>(std::binomial_distribution<std::size_t>(c.reset_shots, p)(rng)) /
                          static_cast<double>(c.reset_shots));
        }
        truth["reset_a"] = c.reset_a;
        truth["reset_b"] = c.reset_b;
        truth["reset_t_us"] = c.reset_t_us;
    }
    {
        auto f = ctx.open("decay.csv");
        f << ctx.provenance() << '\n' << "tau_us,population\n";
        for (std::size_t i = 0; i < tau.size(); ++i) f << fmt(tau[i]) << ',' << fmt(pop[i]) << '\n';
    }
    ResetDecayFit rd = fit_reset_decay(tau, pop);

    auto results = ctx.open("results.csv");
    results << ctx.provenance() << '\n' << "parameter,estimate\n";
    results << "chi_mhz," << fmt(tt.chi) << "\nkappa_mhz," << fmt(tt.kappa) << "\nn0," << fmt(tt.n0) << "\nreset_a,"
            << fmt(rd.a) << "\nreset_b," << fmt(rd.b) << "\nreset_t_us," << fmt(rd.T) << '\n';
    ctx.log << "two-tone: chi " << fmt(tt.chi) << " MHz, kappa " << fmt(tt.kappa) << " MHz, n0 " << fmt(tt.n0)
            << " (" << tt.rows << " rows)\nreset: a " << fmt(rd.a) << ", T " << fmt(rd.T) << " us\n";
    json body{{"two_tone", json::parse(two_tone_fit_json(tt))}, {"reset_decay", json::parse(reset_fit_json(rd))}};
    if (!truth.is_null()) body["truth"] = truth;
    ctx.write_summary(body);
    return 0;
}

}  // namespace

int run(const RunConfig& config, std::ostream& log) {
    validate(config);
    fs::create_directories(config.out);
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(config_hash(config)));
    Context ctx{config, log, fs::path(config.out), hex};
    const std::string& e = config.experiment;
    if (e == "sample") return run_sample(ctx);
    if (e == "decode" || e == "sweep-rounds") return run_decode(ctx);
    if (e == "soft-compare") return run_soft_compare(ctx);
    if (e == "calibrate") return run_calibrate(ctx);
    if (e == "realtime") return run_realtime(ctx);
    if (e == "t1clock") return run_t1clock(ctx);
    return run_reset_fit(ctx);
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    try {
        RunConfig config;
        if (!parse_args(argc, argv, config, out)) return 0;
        return run(config, out);
    } catch (const ConfigError& e) {
        err << "rtqec: invalid configuration: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "rtqec: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace rtqec::cli
