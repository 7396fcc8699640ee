// Copyright 2026 The Qubus Lab Authors
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

// Seeded Monte Carlo for chain-growth strategies. Every trial draws from its
// own stream derived from (master seed, trial index), and aggregation runs
// in trial order, so results do not depend on the thread count.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "qubus/analytics.hpp"
#include "qubus/rng.hpp"

namespace qubus {

enum class Strategy { Sequential, Merge, DivideConquer, VerticalLink };

inline std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Sequential:
            return "sequential";
        case Strategy::Merge:
            return "merge";
        case Strategy::DivideConquer:
            return "divide_conquer";
        case Strategy::VerticalLink:
            return "vertical_link";
    }
    return "?";
}

inline Strategy parse_strategy(const std::string &name) {
    if (name == "sequential" || name == "seq") {
        return Strategy::Sequential;
    }
    if (name == "merge") {
        return Strategy::Merge;
    }
    if (name == "divide_conquer" || name == "dc" || name == "divide-conquer") {
        return Strategy::DivideConquer;
    }
    if (name == "vertical_link" || name == "vertical" || name == "vertical-link") {
        return Strategy::VerticalLink;
    }
    throw std::invalid_argument("unknown strategy: " + name);
}

/// What happens when a sequential chain is measured down to nothing.
enum class SequentialFloor {
    Unbounded,  // length keeps following the +1/-1 walk, below zero if need be
    Reseed,     // a fresh qubit restarts the chain at length 1 (no gate attempt)
};

struct StrategyConfig {
    Strategy variant = Strategy::Sequential;
    double p = 0.75;
    double gate_time = 1.0;
    long long target_L = 41;
    std::optional<int> rounds_k;  // divide_conquer rounds; sequential fixed-round mode
    std::uint64_t initial_qubits = 1 << 16;
    std::uint64_t trials = 1000;
    std::uint64_t master_seed = 1;
    unsigned threads = 1;
    std::uint64_t max_ops = 0;  // per-trial cap on gate attempts; 0 = none
    SequentialFloor floor = SequentialFloor::Unbounded;
    std::optional<int> L0;  // merge piece length; default next integer above the critical length

    void validate() const {
        require_probability(p);
        if (trials < 1) {
            throw std::invalid_argument("trials must be positive");
        }
        if (!(gate_time >= 0)) {
            throw std::invalid_argument("gate time must be non-negative");
        }
        switch (variant) {
            case Strategy::Sequential:
                if (!rounds_k && target_L < 1) {
                    throw std::invalid_argument("target length must be at least 1");
                }
                if (!rounds_k && p <= 0.5 && max_ops == 0) {
                    throw std::invalid_argument("sequential growth with p <= 1/2 needs a trial cap (max_ops)");
                }
                break;
            case Strategy::Merge:
                if (!(static_cast<double>(target_L) > critical_length(p))) {
                    throw std::invalid_argument("merge target length must exceed the critical length");
                }
                if (L0 && !(*L0 > critical_length(p))) {
                    throw std::invalid_argument("merge piece length must exceed the critical length");
                }
                break;
            case Strategy::DivideConquer:
                if (!rounds_k || *rounds_k < 0 || *rounds_k > 62) {
                    throw std::invalid_argument("divide_conquer needs rounds_k in [0, 62]");
                }
                if (initial_qubits < 1) {
                    throw std::invalid_argument("initial qubit count must be positive");
                }
                break;
            case Strategy::VerticalLink:
                break;
        }
    }
};

struct TrialRecord {
    std::uint64_t index = 0;
    std::uint64_t seed = 0;
    double ops = 0;
    double time = 0;
    double consumed = 0;
    double wasted = 0;
    double final_length = 0;
    double structure_qubits = 0;
    std::uint64_t reseeds = 0;
    bool capped = false;
    std::vector<double> chains;  // divide_conquer: chains alive after each round 0..k
    std::vector<double> round_ops;  // divide_conquer: cumulative attempts after each round 0..k
};

struct Summary {
    std::uint64_t count = 0;
    double mean = 0;
    double variance = 0;  // sample variance
    double stderr_ = 0;
    double ci95 = 0;

    static Summary of(const std::vector<double> &xs) {
        Summary s;
        s.count = xs.size();
        if (xs.empty()) {
            return s;
        }
        CompensatedSum sum;
        for (double x : xs) {
            sum.add(x);
        }
        s.mean = sum.value() / static_cast<double>(xs.size());
        if (xs.size() > 1) {
            CompensatedSum sq;
            for (double x : xs) {
                sq.add((x - s.mean) * (x - s.mean));
            }
            s.variance = sq.value() / static_cast<double>(xs.size() - 1);
        }
        s.stderr_ = std::sqrt(s.variance / static_cast<double>(xs.size()));
        s.ci95 = 1.959963984540054 * s.stderr_;
        return s;
    }
};

struct GrowthStats {
    StrategyConfig config;
    std::vector<TrialRecord> trials;
    Summary ops, time, consumed, wasted, final_length;
    std::vector<Summary> chains;      // divide_conquer, per round
    std::vector<Summary> qubits;      // divide_conquer, per round: chains * length
    std::vector<Summary> round_ops;   // divide_conquer, cumulative per round
    std::uint64_t capped_trials = 0;
    std::uint64_t reseeds = 0;
};

namespace detail {

inline TrialRecord sequential_trial(const StrategyConfig &c, Rng &rng) {
    TrialRecord r;
    long long length = 1;
    double consumed = 1;
    double wasted = 0;
    double ops = 0;
    const bool fixed_rounds = c.rounds_k.has_value();
    const double rounds = fixed_rounds ? *c.rounds_k : 0;
    while (fixed_rounds ? ops < rounds : length < c.target_L) {
        if (c.max_ops && ops >= static_cast<double>(c.max_ops)) {
            r.capped = true;
            break;
        }
        if (length <= 0 && c.floor == SequentialFloor::Reseed) {
            consumed += 1;
            length = 1;
            r.reseeds++;
            continue;
        }
        consumed += 1;
        ops += 1;
        if (rng.bernoulli(c.p)) {
            length += 1;
        } else {
            length -= 1;
            wasted += 2;
        }
    }
    r.ops = ops;
    r.time = ops * c.gate_time;
    r.final_length = static_cast<double>(length);
    r.structure_qubits = static_cast<double>(length);
    r.consumed = consumed;
    // A reseed discards nothing itself but the chain it replaces was already
    // accounted as wasted qubit by qubit.
    r.wasted = wasted;
    return r;
}

inline TrialRecord vertical_trial(const StrategyConfig &c, Rng &rng) {
    TrialRecord r;
    double consumed = 4;
    double ops = 0;
    while (true) {
        if (c.max_ops && ops >= static_cast<double>(c.max_ops)) {
            r.capped = true;
            break;
        }
        ops += 1;
        if (rng.bernoulli(c.p)) {
            break;
        }
        consumed += 2;
    }
    r.ops = ops;
    r.time = ops * c.gate_time;
    r.consumed = consumed;
    r.wasted = consumed;
    r.final_length = r.capped ? 0 : 1;  // links made
    return r;
}

inline TrialRecord dc_trial(const StrategyConfig &c, Rng &rng) {
    TrialRecord r;
    const int k = *c.rounds_k;
    std::uint64_t chains = c.initial_qubits;
    double ops = 0;
    r.chains.push_back(static_cast<double>(chains));
    r.round_ops.push_back(0);
    for (int round = 1; round <= k; round++) {
        std::uint64_t pairs = chains / 2;  // an unpaired chain is dropped
        std::uint64_t survivors = 0;
        for (std::uint64_t i = 0; i < pairs; i++) {
            survivors += rng.bernoulli(c.p) ? 1 : 0;
        }
        ops += static_cast<double>(pairs);
        chains = survivors;
        r.chains.push_back(static_cast<double>(chains));
        r.round_ops.push_back(ops);
    }
    const double len = dc_length(k);
    r.ops = ops;
    r.time = k * c.gate_time;
    r.final_length = chains > 0 ? len : 0;
    r.structure_qubits = static_cast<double>(chains) * len;
    r.consumed = static_cast<double>(c.initial_qubits);
    r.wasted = r.consumed - r.structure_qubits;
    return r;
}

/// One chain of 2^{K-1}+1 qubits grown by pairing without recycling: a failed
/// join discards both halves and the level is rebuilt.
struct Piece {
    double length = 1;
    double ops = 0;
    double time = 0;
    double qubits = 1;
};

inline Piece build_piece(int K, double p, double t, Rng &rng, std::uint64_t cap, double &ops_so_far, bool &capped) {
    if (K == 0) {
        return {};
    }
    Piece out;
    out.qubits = 0;
    while (true) {
        Piece a = build_piece(K - 1, p, t, rng, cap, ops_so_far, capped);
        Piece b = build_piece(K - 1, p, t, rng, cap, ops_so_far, capped);
        out.ops += a.ops + b.ops + 1;
        out.qubits += a.qubits + b.qubits;
        out.time += std::max(a.time, b.time) + t;
        ops_so_far += 1;
        if (capped || (cap && ops_so_far >= static_cast<double>(cap))) {
            capped = true;
            out.length = dc_length(K);
            return out;
        }
        if (rng.bernoulli(p)) {
            out.length = dc_length(K);
            return out;
        }
    }
}

inline TrialRecord merge_trial(const StrategyConfig &c, Rng &rng) {
    TrialRecord r;
    const double Lc = critical_length(c.p);
    const int L0 = c.L0.value_or(minimal_length(c.p));
    const int K = static_cast<int>(std::ceil(std::log2(static_cast<double>(L0) - 1) + 1 - 1e-12));
    const double piece_len = dc_length(K);
    const auto M = static_cast<std::size_t>(
        std::max(1.0, std::ceil((static_cast<double>(c.target_L) - Lc) / (piece_len - Lc) - 1e-12)));
    double ops = 0;
    bool capped = false;
    std::vector<double> lengths, times;
    double consumed = 0;
    for (std::size_t i = 0; i < M; i++) {
        Piece pc = build_piece(K, c.p, c.gate_time, rng, c.max_ops, ops, capped);
        lengths.push_back(pc.length);
        times.push_back(pc.time);
        consumed += pc.qubits;
    }
    double time = times.empty() ? 0 : *std::max_element(times.begin(), times.end());
    // Hierarchical merging: adjacent chains join in parallel per level.
    while (lengths.size() > 1 && !capped) {
        std::vector<double> next;
        double level_time = 0;
        for (std::size_t i = 0; i + 1 < lengths.size(); i += 2) {
            double a = lengths[i], b = lengths[i + 1];
            double attempts = 0;
            while (a > 0 && b > 0) {
                attempts += 1;
                ops += 1;
                if (c.max_ops && ops >= static_cast<double>(c.max_ops)) {
                    capped = true;
                }
                if (rng.bernoulli(c.p)) {
                    a = a + b - 1;
                    b = 0;
                    break;
                }
                a -= 1;
                b -= 1;
            }
            next.push_back(a + b);
            level_time = std::max(level_time, attempts * c.gate_time);
        }
        if (lengths.size() % 2 == 1) {
            next.push_back(lengths.back());
        }
        time += level_time;
        lengths = std::move(next);
    }
    r.ops = ops;
    r.time = time;
    r.capped = capped;
    r.final_length = lengths.empty() ? 0 : lengths.front();
    r.structure_qubits = r.final_length;
    r.consumed = consumed;
    r.wasted = consumed - r.final_length;
    return r;
}

inline TrialRecord run_trial(const StrategyConfig &c, std::uint64_t index) {
    Rng rng(c.master_seed, index);
    TrialRecord r;
    switch (c.variant) {
        case Strategy::Sequential:
            r = sequential_trial(c, rng);
            break;
        case Strategy::Merge:
            r = merge_trial(c, rng);
            break;
        case Strategy::DivideConquer:
            r = dc_trial(c, rng);
            break;
        case Strategy::VerticalLink:
            r = vertical_trial(c, rng);
            break;
    }
    r.index = index;
    r.seed = derive_seed(c.master_seed, index);
    return r;
}

template <typename F>
std::vector<double> column(const std::vector<TrialRecord> &rs, F &&f) {
    std::vector<double> out;
    out.reserve(rs.size());
    for (const auto &r : rs) {
        out.push_back(f(r));
    }
    return out;
}

}  // namespace detail

inline GrowthStats simulate(const StrategyConfig &config) {
    config.validate();
    GrowthStats s;
    s.config = config;
    s.trials.resize(config.trials);
    const unsigned workers = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(config.trials)));
    std::atomic<std::uint64_t> next{0};
    auto work = [&] {
        constexpr std::uint64_t chunk = 64;
        while (true) {
            std::uint64_t start = next.fetch_add(chunk);
            if (start >= config.trials) {
                return;
            }
            std::uint64_t end = std::min<std::uint64_t>(start + chunk, config.trials);
            for (std::uint64_t i = start; i < end; i++) {
                s.trials[i] = detail::run_trial(config, i);
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; w++) {
            pool.emplace_back(work);
        }
        for (auto &th : pool) {
            th.join();
        }
    }
    using detail::column;
    s.ops = Summary::of(column(s.trials, [](const TrialRecord &r) { return r.ops; }));
    s.time = Summary::of(column(s.trials, [](const TrialRecord &r) { return r.time; }));
    s.consumed = Summary::of(column(s.trials, [](const TrialRecord &r) { return r.consumed; }));
    s.wasted = Summary::of(column(s.trials, [](const TrialRecord &r) { return r.wasted; }));
    s.final_length = Summary::of(column(s.trials, [](const TrialRecord &r) { return r.final_length; }));
    for (const auto &r : s.trials) {
        s.capped_trials += r.capped ? 1 : 0;
        s.reseeds += r.reseeds;
    }
    if (config.variant == Strategy::DivideConquer) {
        for (int j = 0; j <= *config.rounds_k; j++) {
            const double len = dc_length(j);
            s.chains.push_back(Summary::of(column(s.trials, [j](const TrialRecord &r) { return r.chains[j]; })));
            s.qubits.push_back(
                Summary::of(column(s.trials, [j, len](const TrialRecord &r) { return r.chains[j] * len; })));
            s.round_ops.push_back(
                Summary::of(column(s.trials, [j](const TrialRecord &r) { return r.round_ops[j]; })));
        }
    }
    return s;
}

struct JoinStats {
    Summary length;
    double exact = 0;  // finite-sum expectation
};

/// Two L-chains joined by repeated attempts; each failure shrinks both by one.
inline JoinStats join_pair_experiment(double p, long long L, std::uint64_t trials, std::uint64_t seed) {
    require_probability(p);
    if (L < 1) {
        throw std::invalid_argument("chain length must be at least 1");
    }
    if (trials < 1) {
        throw std::invalid_argument("trials must be positive");
    }
    std::vector<double> finals(trials);
    for (std::uint64_t i = 0; i < trials; i++) {
        Rng rng(seed, i);
        long long a = L;
        double final_len = 0;
        while (a > 0) {
            if (rng.bernoulli(p)) {
                final_len = static_cast<double>(2 * a - 1);
                break;
            }
            a -= 1;
        }
        finals[i] = final_len;
    }
    JoinStats js;
    js.length = Summary::of(finals);
    js.exact = join_yield(static_cast<double>(L), p, JoinMode::ExactSum);
    return js;
}

// ---------------------------------------------------------------------------
// Comparison with closed forms.

struct AnalyticValue {
    std::string metric;
    double value = 0;
    std::string law;
};

/// Closed-form expectations matching the metrics collected for `c`.
inline std::vector<AnalyticValue> analytic_reference(const StrategyConfig &c) {
    std::vector<AnalyticValue> out;
    const double t = c.gate_time;
    switch (c.variant) {
        case Strategy::Sequential: {
            if (c.rounds_k) {
                out.push_back({"final_length", 1 + *c.rounds_k * (2 * c.p - 1), "1 + k(2p-1)"});
                break;
            }
            if (c.p > 0.5) {
                double L = static_cast<double>(c.target_L);
                auto s = seq_scaling(L, c.p, t);
                out.push_back({"ops", s.N, "(L-1)/(2p-1)"});
                out.push_back({"time", s.T, "t(L-1)/p"});
                out.push_back({"wasted", s.N - (L - 1), "N - (L-1)"});
            }
            break;
        }
        case Strategy::VerticalLink:
            out.push_back({"consumed", 2 * (1 / c.p + 1), "2(1/p+1)"});
            out.push_back({"ops", 1 / c.p, "1/p"});
            break;
        case Strategy::DivideConquer: {
            const double n = static_cast<double>(c.initial_qubits);
            for (int j = 0; j <= *c.rounds_k; j++) {
                auto d = dc_scaling(j, c.p, n, t);
                out.push_back({"C[" + std::to_string(j) + "]", d.C, "n(p/2)^k"});
                out.push_back({"Q[" + std::to_string(j) + "]", d.Q, "n(p/2)^k(2^(k-1)+1)"});
            }
            auto d = dc_scaling(*c.rounds_k, c.p, n, t);
            out.push_back({"wasted", d.W, "n - Q"});
            out.push_back({"ops", d.G, "sum_{j=1}^{k-1} C[j]/2"});
            out.push_back({"time", d.T_dc, "t(1+log2(L-1))"});
            break;
        }
        case Strategy::Merge: {
            const double L = static_cast<double>(c.target_L);
            const int L0 = c.L0.value_or(minimal_length(c.p));
            auto m = merge_scaling(L, c.p, L0, t);
            out.push_back({"ops", m.N_floor, "merge sum (limit floor)"});
            if (m.N_ceil != m.N_floor) {
                out.push_back({"ops", m.N_ceil, "merge sum (limit ceil)"});
            }
            if (m.N_reference) {
                out.push_back({"ops", *m.N_reference, m.reference_label});
            }
            out.push_back({"time", m.T_closed, "(t/p)(1+log2((L-Lc)/(L0-Lc)))"});
            break;
        }
    }
    return out;
}

struct ComparisonRow {
    std::string metric;
    std::string law;
    double empirical = 0;
    double stderr_ = 0;
    double analytic = 0;
    double z = 0;
    double relative = 0;
    bool pass = false;
};

inline ComparisonRow compare_value(const std::string &metric, const Summary &s, const AnalyticValue &a,
                                   double z_limit = 3.0) {
    ComparisonRow row;
    row.metric = metric;
    row.law = a.law;
    row.empirical = s.mean;
    row.stderr_ = s.stderr_;
    row.analytic = a.value;
    double diff = s.mean - a.value;
    if (s.stderr_ > 0) {
        row.z = diff / s.stderr_;
    } else {
        row.z = std::abs(diff) <= 1e-12 * std::max(1.0, std::abs(a.value))
                    ? 0.0
                    : std::copysign(std::numeric_limits<double>::infinity(), diff);
    }
    row.relative = a.value != 0 ? diff / a.value : diff;
    row.pass = std::abs(row.z) <= z_limit;
    return row;
}

/// Per-metric z-scores; |z| > 3 is flagged, never thrown.
inline std::vector<ComparisonRow> compare_to_analytic(const GrowthStats &stats,
                                                      const std::vector<AnalyticValue> &reference) {
    std::vector<ComparisonRow> rows;
    for (const auto &a : reference) {
        const Summary *s = nullptr;
        std::size_t round = 0;
        if (a.metric == "ops") {
            s = &stats.ops;
        } else if (a.metric == "time") {
            s = &stats.time;
        } else if (a.metric == "consumed") {
            s = &stats.consumed;
        } else if (a.metric == "wasted") {
            s = &stats.wasted;
        } else if (a.metric == "final_length") {
            s = &stats.final_length;
        } else if (a.metric.size() > 3 && (a.metric[0] == 'C' || a.metric[0] == 'Q') && a.metric[1] == '[') {
            round = std::stoul(a.metric.substr(2));
            const auto &vec = a.metric[0] == 'C' ? stats.chains : stats.qubits;
            if (round >= vec.size()) {
                throw std::invalid_argument("round out of range for comparison");
            }
            s = &vec[round];
        } else {
            throw std::invalid_argument("unknown metric: " + a.metric);
        }
        rows.push_back(compare_value(a.metric, *s, a));
    }
    return rows;
}

inline std::vector<ComparisonRow> compare_to_analytic(const GrowthStats &stats) {
    return compare_to_analytic(stats, analytic_reference(stats.config));
}

}  // namespace qubus
