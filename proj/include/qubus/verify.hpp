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

// Cross-verification suite: each criterion checks the library against an
// independent oracle or a closed form and reports pass, flag or fail.

#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "qubus/analytics.hpp"
#include "qubus/busim.hpp"
#include "qubus/gates.hpp"
#include "qubus/graphstab.hpp"
#include "qubus/growth.hpp"
#include "qubus/io.hpp"
#include "qubus/oracle/quadrature.hpp"
#include "qubus/oracle/statevector.hpp"

namespace qubus::verify {

enum class Status { Pass, Flag, Fail };

inline const char *status_name(Status s) {
    switch (s) {
        case Status::Pass:
            return "PASS";
        case Status::Flag:
            return "FLAG";
        case Status::Fail:
            return "FAIL";
    }
    return "?";
}

struct Check {
    std::string what;
    bool ok = false;
    std::string detail;
};

struct Criterion {
    Criterion(int id_, std::string title_) : id(id_), title(std::move(title_)) {}

    int id = 0;
    std::string title;
    Status status = Status::Pass;
    std::vector<Check> checks;
    std::vector<std::string> flags;  // known discrepancies, reported without failing
    double seconds = 0;
    double budget_seconds = 0;  // 0 = no runtime bound

    void check(std::string what, bool ok, std::string detail = {}) {
        checks.push_back({std::move(what), ok, std::move(detail)});
    }
};

struct Options {
    bool quick = false;
    unsigned threads = 1;
    std::uint64_t seed = 20070101;
};

namespace detail {

inline std::string num(double x, int digits = 6) { return io::fmt(x, digits); }

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }

inline QubitState random_state(std::size_t n, Rng &rng) {
    std::vector<Complex> amps(std::size_t{1} << n);
    for (auto &a : amps) {
        a = Complex(2 * rng.uniform() - 1, 2 * rng.uniform() - 1);
    }
    QubitState s(n, std::move(amps));
    s.normalize();
    return s;
}

}  // namespace detail

// 1. Two-qubit momentum parity gate.
inline Criterion parity_gate(const Options &) {
    Criterion c{1, "parity gate: exact outcome probabilities and odd-Bell posterior"};
    c.budget_seconds = 1;
    auto t = parity_momentum_table(1000, 0.003, QubitState::plus(2));
    const std::pair<const char *, double> want[] = {{"odd-bell", 0.5}, {"product-00", 0.25}, {"product-11", 0.25}};
    for (auto [label, p] : want) {
        const auto &o = t.find(label);
        c.check(std::string("P(") + label + ") = " + detail::num(p), detail::close(o.probability, p, 1e-12),
                detail::num(o.probability, 17));
    }
    const auto &odd = t.find("odd-bell");
    double f = odd.posterior.corrected(odd.corrections).fidelity(states::odd_bell());
    c.check("odd-Bell fidelity >= 1-1e-12", f >= 1 - 1e-12, detail::num(f, 17));
    c.check("exhaustive probabilities sum to 1", detail::close(t.total_probability(), 1, 1e-12));
    return c;
}

// 2. Momentum-quadrature misassignment by direct integration.
inline Criterion momentum_error(const Options &) {
    Criterion c{2, "momentum-quadrature error: integrated tail vs erfc"};
    c.budget_seconds = 1;
    auto integrated = [](double alpha, double theta) {
        // Relative rotation theta between neighbouring branches: per-qubit theta/2.
        HybridState s = parity_gate_state(alpha, theta / 2, QubitState::plus(2));
        PeakModel m = homodyne_pdf(s, std::numbers::pi / 2);
        // Peak 0 is the upper side peak, peak 1 its neighbour; its window ends at their midpoint.
        auto [lo, hi] = m.window(0);
        (void)hi;
        return oracle::normal_lower_mass(m.peaks[0].center, lo);
    };
    for (auto [alpha, theta] : {std::pair{1000.0, 0.003}, std::pair{500.0, 0.0063}}) {
        double num = integrated(alpha, theta);
        double formula = error_budget(alpha, theta).p_err_momentum;
        c.check("alpha=" + detail::num(alpha) + " theta=" + detail::num(theta) + ": relative 1e-6",
                detail::rel_close(num, formula, 1e-6),
                "integrated " + detail::num(num, 12) + " formula " + detail::num(formula, 12));
    }
    double theta = 0.003;
    double alpha = std::numbers::pi / std::sin(theta);
    double at_pi = integrated(alpha, theta);
    c.check("alpha sin(theta) = pi gives error < 1e-3", at_pi < 1e-3, detail::num(at_pi, 6));
    return c;
}

// 3. Three-qubit and cascaded gates.
inline Criterion three_qubit(const Options &) {
    Criterion c{3, "three-qubit gate and cascade success law"};
    auto t = three_qubit_table(1000, 0.003, QubitState::plus(3));
    const std::pair<const char *, double> want[] = {{"ghz", 0.25},         {"bell-q3-0", 0.25},  {"bell-q3-1", 0.25},
                                                    {"product-001", 0.125}, {"product-110", 0.125}};
    for (auto [label, p] : want) {
        c.check(std::string("P(") + label + ") = " + detail::num(p),
                detail::close(t.find(label).probability, p, 1e-12), detail::num(t.find(label).probability, 17));
    }
    c.check("pair success 3/4", detail::close(t.success_probability(), 0.75, 1e-12));
    const auto &g = t.find("ghz");
    double f = g.posterior.corrected(g.corrections).fidelity(states::ghz(3));
    c.check("GHZ fidelity >= 1-1e-12", f >= 1 - 1e-12, detail::num(f, 17));
    for (std::size_t n = 2; n <= 8; n++) {
        auto [good, total] = cascade_success_count(n);
        bool exact = good * 2 == total * 2 - 4 * (total >> n);  // good/total == 1 - 2^{1-n}
        auto table = cascaded_table(n, 1000, 0.003);
        double want_p = 1 - std::ldexp(1.0, 1 - static_cast<int>(n));
        c.check("cascade n=" + std::to_string(n) + ": p = 1 - 2^(1-n)",
                exact && detail::close(table.success_probability(), want_p, 1e-12),
                std::to_string(good) + "/" + std::to_string(total));
    }
    return c;
}

// 4. Photon-counting parity gate.
inline Criterion bucket_gate(const Options &) {
    Criterion c{4, "bucket gate: vacuum and photon-number posteriors, vacuum error"};
    const double alpha = 1000, theta = 0.003;
    auto t = parity_bucket_table(alpha, theta, QubitState::plus(2), true);
    const auto &vac = t.find("odd-bell");
    double fv = vac.posterior.fidelity(states::odd_bell());
    c.check("vacuum posterior is the odd Bell state", fv >= 1 - 1e-12, detail::num(fv, 17));
    double worst = 1;
    std::size_t rows = 0;
    for (const auto &o : t.outcomes) {
        if (o.label == "odd-bell" || o.probability < 1e-12) {
            continue;
        }
        rows++;
        worst = std::min(worst, o.fidelity);
    }
    c.check("photon-number posteriors (|00> + (-1)^n |11>)/sqrt2 after local phase", rows > 0 && worst >= 1 - 1e-12,
            std::to_string(rows) + " outcomes, worst fidelity " + detail::num(worst, 17));
    c.check("outcome probabilities sum to 1", detail::close(t.total_probability(), 1, 1e-9),
            detail::num(t.total_probability(), 15));
    // Vacuum error at alpha theta = 2.
    const double a2 = 2 / theta;
    auto b = error_budget(a2, theta);
    c.check("vacuum error equals exp(-4 (alpha theta)^2)", detail::rel_close(b.p_err_vacuum, std::exp(-16.0), 1e-12),
            detail::num(b.p_err_vacuum, 12));
    c.flags.push_back("vacuum error at alpha*theta = 2 is exp(-16) = " + detail::num(b.p_err_vacuum, 4) +
                      ", not the quoted 3e-4 (which is close to exp(-8)); exact overlap exp(-4 alpha^2 sin^2 theta) = " +
                      detail::num(b.p_err_vacuum_exact, 4));
    return c;
}

// 5. Measurement-free geometric sequences.
inline Criterion geometric(const Options &opt) {
    Criterion c{5, "geometric-phase sequences: CZ, compiled displacement, star and chain"};
    c.budget_seconds = 5;
    Rng rng(opt.seed, 5);
    const double b = std::sqrt(std::numbers::pi / 8);
    double worst = 1, spread = 0;
    for (int i = 0; i < 20; i++) {
        QubitState in = detail::random_state(2, rng);
        Complex bus(4 * rng.uniform() - 2, 4 * rng.uniform() - 2);
        auto r = geometric_cz(Complex(0, b), b, in, bus);
        worst = std::min(worst, r.corrected.fidelity(apply_cz(in, 0, 1)));
        spread = std::max(spread, r.bus_spread);
    }
    c.check("bus spread 0 after the four displacements", spread <= 1e-12, detail::num(spread));
    c.check("corrected unitary is CZ on 20 random inputs", worst >= 1 - 1e-12, detail::num(worst, 17));

    double worst_cd = 1;
    for (int i = 0; i < 20; i++) {
        double alpha = 0.2 + 3 * rng.uniform();
        double theta = 0.05 + 1.2 * rng.uniform();
        Complex bus(2 * rng.uniform() - 1, 2 * rng.uniform() - 1);
        QubitState in = detail::random_state(1, rng);
        auto cd = compile_conditional_displacement(alpha, theta, 0, 1, bus);
        HybridState start = HybridState::from_qubits(in, bus);
        HybridState seq = cd.sequence.run(start);
        HybridState direct = apply_conditional_displacement(start, 0, cd.net);
        // Same bus per branch; compare the coefficient vectors after the residual correction.
        std::vector<Complex> a(2), d(2);
        bool buses_match = true;
        for (const auto &br : seq.branches()) {
            a[br.bits] = br.coeff;
        }
        for (const auto &br : direct.branches()) {
            d[br.bits] = br.coeff;
            for (const auto &bs : seq.branches()) {
                if (bs.bits == br.bits && std::abs(bs.bus - br.bus) > 1e-9) {
                    buses_match = false;
                }
            }
        }
        QubitState qa(1, a), qd(1, d);
        qa.apply(cd.corrections);
        double f = buses_match ? qa.fidelity(qd) : 0.0;
        worst_cd = std::min(worst_cd, f);
    }
    c.check("compiled conditional displacement matches direct (20 random cases)", worst_cd >= 1 - 1e-12,
            detail::num(worst_cd, 17));

    for (std::size_t n = 3; n <= 5; n++) {
        auto star = star_sequence(n, b);
        auto s = check_sequence(star, GraphSpec::star(n));
        c.check("star N=" + std::to_string(n) + " equals star graph after corrections",
                s.stabilizer_pass && s.bus_spread <= 1e-12);
        auto chain = chain_sequence(n, b);
        auto l = check_sequence(chain, GraphSpec::chain(n));
        c.check("chain N=" + std::to_string(n) + " equals linear cluster after corrections",
                l.stabilizer_pass && l.bus_spread <= 1e-12);
    }
    return c;
}

namespace detail {

struct OracleTally {
    std::size_t scenarios = 0;
    std::size_t mismatches = 0;
    std::string first_failure;

    void record(bool ok, const std::string &name) {
        scenarios++;
        if (!ok) {
            mismatches++;
            if (first_failure.empty()) {
                first_failure = name;
            }
        }
    }
};

inline bool same_state(const StabilizerTableau &tab, const oracle::DenseState &dense) {
    if (tab.qubit_count() != dense.qubit_count()) {
        return false;
    }
    if (tab.qubit_count() == 0) {
        return true;
    }
    return oracle::tableau_to_state(tab).fidelity(dense.state()) >= 1 - 1e-12;
}

inline std::vector<std::pair<std::string, GraphSpec>> small_graphs() {
    std::vector<std::pair<std::string, GraphSpec>> gs;
    for (std::size_t n = 1; n <= 4; n++) {
        gs.emplace_back("chain" + std::to_string(n), GraphSpec::chain(n));
    }
    gs.emplace_back("star4", GraphSpec::star(4));
    gs.emplace_back("edgeless3", GraphSpec(3));
    gs.emplace_back("triangle", GraphSpec(3, {{0, 1}, {1, 2}, {0, 2}}));
    gs.emplace_back("square", GraphSpec(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}));
    return gs;
}

inline void measurement_scenarios(OracleTally &tally) {
    for (const auto &[name, g] : small_graphs()) {
        for (std::size_t q = 0; q < g.vertex_count; q++) {
            for (char basis : {'X', 'Y', 'Z'}) {
                for (int outcome : {+1, -1}) {
                    std::string id = name + " measure " + basis + std::to_string(q) + (outcome > 0 ? "+" : "-");
                    auto dense = oracle::DenseState::graph(g);
                    double p_dense = dense.project(PauliString::single(g.vertex_count, q, basis), outcome);
                    StabilizerTableau tab = graph_state(g);
                    double p_tab = 0;
                    try {
                        p_tab = tab.measure_single(q, basis, outcome).probability;
                    } catch (const std::domain_error &) {
                        p_tab = 0;
                    }
                    bool ok = close(p_tab, p_dense, 1e-12);
                    if (ok && p_tab > 0) {
                        tab.validate();
                        ok = same_state(tab, dense);
                    }
                    tally.record(ok, id);
                }
            }
        }
    }
}

inline std::vector<std::size_t> chain_offsets(const std::vector<std::size_t> &lengths) {
    std::vector<std::size_t> off{0};
    for (std::size_t L : lengths) {
        off.push_back(off.back() + L);
    }
    return off;
}

inline void fusion_scenarios(OracleTally &tally) {
    // Parity-2 on the last qubit of chain 1 and the first of chain 2.
    for (std::size_t L1 = 1; L1 <= 3; L1++) {
        for (std::size_t L2 = 1; L1 + L2 <= 4; L2++) {
            for (const auto &label : fuse_outcome_labels(FuseVariant::Parity2)) {
                std::string id = "parity-2 " + std::to_string(L1) + "+" + std::to_string(L2) + " " + label;
                const std::size_t a = L1 - 1, b = L1;
                ClusterState cs = ClusterState::chains({L1, L2});
                auto dense = oracle::DenseState::graph(cs.graph());
                bool ok = true;
                try {
                    auto res = cs.fuse({a, b}, FuseVariant::Parity2, label);
                    const std::size_t n = L1 + L2;
                    PauliString zz(n);
                    zz.zs[a] = zz.zs[b] = 1;
                    double p = dense.project(zz, label == "odd" ? -1 : +1);
                    if (label == "odd") {
                        dense.x(b);
                    }
                    if (label == "odd" || label == "even") {
                        dense.h(b);
                    } else {
                        p *= dense.project(PauliString::single(n, a, 'Z'), label == "product-00" ? +1 : -1);
                    }
                    ok = close(p, res.probability, 1e-12) && same_state(cs.tableau(), dense);
                } catch (const std::exception &e) {
                    ok = false;
                    id += std::string(" threw ") + e.what();
                }
                tally.record(ok, id);
            }
        }
    }
    // Gate-3 on three chain ends.
    const std::vector<std::vector<std::size_t>> shapes = {{1, 1, 1}, {2, 1, 1}, {1, 2, 1}, {1, 1, 2}};
    for (const auto &shape : shapes) {
        auto off = chain_offsets(shape);
        const std::size_t a = off[1] - 1, b = off[1], c = off[2];
        for (const auto &label : fuse_outcome_labels(FuseVariant::Gate3)) {
            std::string id = "gate-3 " + std::to_string(shape[0]) + std::to_string(shape[1]) +
                             std::to_string(shape[2]) + " " + label;
            ClusterState cs = ClusterState::chains(shape);
            auto dense = oracle::DenseState::graph(cs.graph());
            const std::size_t n = off.back();
            auto zz = [&](std::size_t u, std::size_t v) {
                PauliString p(n);
                p.zs[u] = p.zs[v] = 1;
                return p;
            };
            bool ok = true;
            try {
                auto res = cs.fuse({a, b, c}, FuseVariant::Gate3, label);
                double p = 1;
                if (label == "bell-q3-0" || label == "bell-q3-1") {
                    p *= dense.project(zz(a, b), -1);
                    p *= dense.project(PauliString::single(n, c, 'Z'), label == "bell-q3-0" ? +1 : -1);
                    dense.x(b);
                    dense.h(b);
                } else {
                    p *= dense.project(zz(a, b), +1);
                    p *= dense.project(zz(b, c), label == "ghz" ? +1 : -1);
                    if (label == "ghz") {
                        dense.h(b);
                        dense.h(c);
                    } else {
                        p *= dense.project(PauliString::single(n, a, 'Z'), label == "product-001" ? +1 : -1);
                    }
                }
                ok = close(p, res.probability, 1e-12) && same_state(cs.tableau(), dense);
            } catch (const std::exception &e) {
                ok = false;
                id += std::string(" threw ") + e.what();
            }
            tally.record(ok, id);
        }
    }
}

inline void recovery_scenarios(OracleTally &tally) {
    for (std::size_t n = 1; n <= 4; n++) {
        for (std::size_t end : {std::size_t{0}, n - 1}) {
            for (int outcome : {+1, -1}) {
                std::string id = "recover chain" + std::to_string(n) + " end " + std::to_string(end) +
                                 (outcome > 0 ? "+" : "-");
                ClusterState cs(GraphSpec::chain(n));
                auto dense = oracle::DenseState::graph(cs.graph());
                bool ok = true;
                try {
                    cs.measure_out(end, outcome);
                    double p = dense.project(PauliString::single(n, end, 'Z'), outcome);
                    cs.recover_failure(end);
                    if (outcome == -1) {
                        for (std::size_t v : GraphSpec::chain(n).neighbors(end)) {
                            dense.z(v);
                        }
                    }
                    dense.remove_basis_qubit(end);
                    ok = close(p, 0.5, 1e-12) && same_state(cs.tableau(), dense);
                    if (ok && n > 1) {
                        ok = equals_up_to_corrections(cs.tableau(), GraphSpec::chain(n - 1), {});
                    }
                } catch (const std::exception &e) {
                    ok = false;
                    id += std::string(" threw ") + e.what();
                }
                tally.record(ok, id);
            }
        }
    }
}

/// True if removing `leaf` from `g` leaves a simple path on the other vertices.
inline bool path_plus_leaf(const GraphSpec &g, std::size_t leaf) {
    if (g.degree(leaf) != 1 && g.vertex_count > 1) {
        return false;
    }
    GraphSpec rest = g.without_vertex(leaf);
    if (rest.edges.size() + 1 != rest.vertex_count) {
        return false;
    }
    std::size_t ends = 0;
    for (std::size_t v = 0; v < rest.vertex_count; v++) {
        std::size_t d = rest.degree(v);
        if (d > 2) {
            return false;
        }
        ends += d <= 1 ? 1 : 0;
    }
    // A forest with V-1 edges is a tree; max degree 2 makes it a path.
    return rest.vertex_count == 1 || ends == 2;
}

}  // namespace detail

// 6. Stabilizer engine vs dense oracle; fusion length law.
inline Criterion stabilizer_oracle(const Options &opt) {
    Criterion c{6, "stabilizer engine vs dense state vector; fusion length law"};
    detail::OracleTally tally;
    detail::measurement_scenarios(tally);
    detail::fusion_scenarios(tally);
    detail::recovery_scenarios(tally);
    c.check("all n <= 4 scenarios match the dense oracle", tally.mismatches == 0,
            std::to_string(tally.scenarios) + " scenarios, " + std::to_string(tally.mismatches) + " mismatches" +
                (tally.first_failure.empty() ? "" : ", first: " + tally.first_failure));
    Rng rng(opt.seed, 6);
    std::size_t good = 0;
    const std::size_t cases = 100;
    for (std::size_t i = 0; i < cases; i++) {
        std::size_t L1 = 1 + rng.next() % 10, L2 = 1 + rng.next() % 10;
        std::string label = rng.bernoulli(0.5) ? "odd" : "even";
        ClusterState cs = ClusterState::chains({L1, L2});
        try {
            auto res = cs.fuse({L1 - 1, L1}, FuseVariant::Parity2, label);
            cs.apply_frame();
            bool ok = res.success && cs.qubit_count() == L1 + L2 && detail::path_plus_leaf(cs.graph(), L1) &&
                      equals_up_to_corrections(cs.tableau(), cs.graph(), {});
            good += ok ? 1 : 0;
        } catch (const std::exception &) {
        }
    }
    c.check("parity-2 success gives a chain of L1+L2-1 plus one dangling bond (100 random cases)", good == cases,
            std::to_string(good) + "/" + std::to_string(cases));
    return c;
}

// 7. Monte Carlo against closed forms.
inline Criterion monte_carlo(const Options &opt) {
    Criterion c{7, "Monte Carlo vs closed forms"};
    const std::uint64_t big = opt.quick ? 1000 : 100000;
    const double rel = opt.quick ? 0.05 : 0.01;
    {
        StrategyConfig cfg;
        cfg.variant = Strategy::Sequential;
        cfg.p = 0.75;
        cfg.target_L = 41;
        cfg.trials = big;
        cfg.master_seed = opt.seed;
        cfg.threads = opt.threads;
        auto t0 = std::chrono::steady_clock::now();
        auto s = simulate(cfg);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        double want = seq_scaling(41, 0.75).N;
        c.check("sequential p=3/4 L=41: mean ops within " + detail::num(rel * 100) + "% of 80 (< 10 s)",
                detail::rel_close(s.ops.mean, want, rel) && secs < 10,
                "mean " + detail::num(s.ops.mean, 8) + " +- " + detail::num(s.ops.ci95, 3) + " in " +
                    detail::num(secs, 3) + " s");
        double T_mc = s.time.mean, T_law = seq_scaling(41, 0.75).T;
        c.flags.push_back("sequential time: Monte Carlo counts one time unit per attempt, giving " +
                          detail::num(T_mc, 5) + " vs t(L-1)/p = " + detail::num(T_law, 5));
    }
    {
        auto js = join_pair_experiment(0.75, 10, big, opt.seed + 1);
        double z = (js.length.mean - js.exact) / js.length.stderr_;
        c.check("join pair p=3/4 L=10 matches the finite sum within 3 stderr", std::abs(z) <= 3,
                "mean " + detail::num(js.length.mean, 8) + " exact " + detail::num(js.exact, 8) + " z " +
                    detail::num(z, 3));
    }
    for (double p : {0.75, 0.5}) {
        StrategyConfig cfg;
        cfg.variant = Strategy::VerticalLink;
        cfg.p = p;
        cfg.trials = big;
        cfg.master_seed = opt.seed + 2;
        cfg.threads = opt.threads;
        auto s = simulate(cfg);
        double want = 2 * (1 / p + 1);
        c.check("vertical link p=" + detail::num(p) + ": mean qubits within " + detail::num(rel * 100) +
                    "% of 2(1/p+1)",
                detail::rel_close(s.consumed.mean, want, rel),
                "mean " + detail::num(s.consumed.mean, 8) + " vs " + detail::num(want, 8));
    }
    const std::uint64_t dc_trials = opt.quick ? 200 : 2000;
    for (double p : {0.5, 0.75}) {
        StrategyConfig cfg;
        cfg.variant = Strategy::DivideConquer;
        cfg.p = p;
        cfg.rounds_k = 8;
        cfg.initial_qubits = 1 << 16;
        cfg.trials = dc_trials;
        cfg.master_seed = opt.seed + 3;
        cfg.threads = opt.threads;
        auto s = simulate(cfg);
        auto rows = compare_to_analytic(s);
        double worst = 0;
        std::string worst_metric;
        bool all = true;
        for (const auto &r : rows) {
            if (r.metric[0] != 'C' && r.metric[0] != 'Q') {
                continue;
            }
            if (std::abs(r.z) > std::abs(worst)) {
                worst = r.z;
                worst_metric = r.metric;
            }
            all = all && r.pass;
        }
        c.check("divide-and-conquer p=" + detail::num(p) + " n=2^16 k<=8: C, Q within 3 stderr", all,
                std::to_string(dc_trials) + " trials, largest |z| " + detail::num(std::abs(worst), 3) + " at " +
                    worst_metric);
        auto d = dc_scaling(8, p, 65536);
        c.flags.push_back("divide-and-conquer ops at p=" + detail::num(p) + ", k=8: Monte Carlo " +
                          detail::num(s.ops.mean, 6) + " vs quoted sum from round 1 " + detail::num(d.G, 6) +
                          " (all rounds " + detail::num(d.G_all, 6) + ")");
    }
    return c;
}

// 8. Constants table and crossover.
inline Criterion constants(const Options &) {
    Criterion c{8, "published constants and the divide-and-conquer/merge crossover"};
    bool law34 = true;
    for (double L : {2.0, 5.0, 10.0, 41.0, 250.0}) {
        law34 = law34 && detail::close(merge_scaling(L, 0.75, 2).N_floor, 8 * L - 44.0 / 3.0, 1e-9);
    }
    c.check("merge sum at p=3/4, L0=2 equals 8L-44/3", law34);
    auto v34 = vertical_cost(0.75, [](double L) { return 8 * L - 44.0 / 3.0; });
    c.check("N_V(p=3/4) = 140/3, i.e. 46.7", detail::close(v34.N_V, 140.0 / 3.0, 1e-9) &&
                                                 detail::close(std::round(v34.N_V * 10) / 10, 46.7, 1e-12),
            detail::num(v34.N_V, 12));
    auto m = merge_scaling(4, 0.5, 4);
    c.check("stored law 16L-50 at p=1/2 with N[4] = 14",
            m.N_reference && detail::close(*m.N_reference, 14, 1e-12) &&
                detail::close(*merge_scaling(10, 0.5, 4).N_reference, 110, 1e-12));
    auto pts = io::scaling_points({"dc", "merge"}, {"N"}, 0.75, 5, 400, 1);
    auto x = io::crossover(pts, "merge", "dc", "N");
    c.check("crossover between divide-and-conquer and merge at p=3/4 lies in [200, 300]",
            x && *x >= 200 && *x <= 300, x ? "L = " + detail::num(*x) : "none");
    c.flags.push_back("merge N0 at p=1/2: the operation sum with limit log2(3)+1 gives " + detail::num(m.N_floor) +
                      " (floor) or " + detail::num(m.N_ceil) + " (ceil), not the quoted 14");
    return c;
}

// 9. Known discrepancies must be reported, not asserted.
inline Criterion discrepancy_flags(const Options &) {
    Criterion c{9, "known discrepancies reported as flags"};
    bool vacuum = false, nv = false;
    for (const auto &k : reference_constants()) {
        if (k.name == "vacuum error alpha*theta=2" && k.discrepancy) {
            vacuum = true;
            c.flags.push_back("vacuum error: quoted " + detail::num(k.quoted) + ", computed " +
                              detail::num(k.computed) + " (" + k.note + ")");
        }
        if (k.name == "vertical N_V p=1/2" && k.discrepancy) {
            nv = true;
            c.flags.push_back("vertical N_V(p=1/2): quoted " + detail::num(k.quoted) + ", composed " +
                              detail::num(k.computed) + " (" + k.note + ")");
        }
    }
    c.check("exp(-16) differs from 3e-4 and is flagged", vacuum);
    c.check("composed N_V(p=1/2) = 94 differs from 70 and is flagged", nv);
    return c;
}

// 10. Determinism across thread counts.
inline Criterion determinism(const Options &opt) {
    Criterion c{10, "growth output byte-identical across thread counts"};
    auto render = [&](StrategyConfig cfg, unsigned threads) {
        cfg.threads = threads;
        auto s = simulate(cfg);
        auto rows = compare_to_analytic(s);
        return io::growth_csv(s, rows) + io::comparison_csv(rows) + io::growth_jsonl(s);
    };
    std::vector<StrategyConfig> cfgs(4);
    cfgs[0].variant = Strategy::Sequential;
    cfgs[0].target_L = 41;
    cfgs[0].trials = 3000;
    cfgs[1].variant = Strategy::VerticalLink;
    cfgs[1].trials = 3000;
    cfgs[2].variant = Strategy::DivideConquer;
    cfgs[2].rounds_k = 6;
    cfgs[2].initial_qubits = 4096;
    cfgs[2].trials = 200;
    cfgs[3].variant = Strategy::Merge;
    cfgs[3].target_L = 30;
    cfgs[3].trials = 500;
    for (auto &cfg : cfgs) {
        cfg.master_seed = opt.seed;
        std::string one = render(cfg, 1), four = render(cfg, 4), seven = render(cfg, 7);
        c.check(strategy_name(cfg.variant) + ": threads 1, 4, 7 give identical bytes", one == four && one == seven,
                std::to_string(one.size()) + " bytes");
        std::string again = render(cfg, 1);
        c.check(strategy_name(cfg.variant) + ": rerun with same seed identical", one == again);
    }
    return c;
}

inline std::vector<std::function<Criterion(const Options &)>> all_criteria() {
    return {parity_gate, momentum_error,    three_qubit,       bucket_gate, geometric,
            stabilizer_oracle, monte_carlo, constants, discrepancy_flags, determinism};
}

inline Criterion run_timed(const std::function<Criterion(const Options &)> &f, const Options &opt) {
    auto t0 = std::chrono::steady_clock::now();
    Criterion c = f(opt);
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_seconds > 0) {
        c.check("runtime < " + detail::num(c.budget_seconds) + " s", c.seconds < c.budget_seconds,
                detail::num(c.seconds, 3) + " s");
    }
    bool ok = true;
    for (const auto &ch : c.checks) {
        ok = ok && ch.ok;
    }
    c.status = !ok ? Status::Fail : (c.flags.empty() ? Status::Pass : Status::Flag);
    return c;
}

inline std::vector<Criterion> run_all(const Options &opt) {
    std::vector<Criterion> out;
    for (const auto &f : all_criteria()) {
        out.push_back(run_timed(f, opt));
    }
    return out;
}

inline std::string report(const std::vector<Criterion> &cs, bool verbose) {
    std::string out;
    char buf[256];
    for (const auto &c : cs) {
        std::snprintf(buf, sizeof buf, "[%s] %2d  %s  (%.2f s)\n", status_name(c.status), c.id, c.title.c_str(),
                      c.seconds);
        out += buf;
        for (const auto &ch : c.checks) {
            if (verbose || !ch.ok) {
                out += std::string("       ") + (ch.ok ? "ok   " : "FAIL ") + ch.what +
                       (ch.detail.empty() ? "" : "  [" + ch.detail + "]") + "\n";
            }
        }
        for (const auto &f : c.flags) {
            out += "       flag " + f + "\n";
        }
    }
    return out;
}

}  // namespace qubus::verify
