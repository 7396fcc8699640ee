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

// Randomized invariant checks across modules.

#include <gtest/gtest.h>

#include <cstring>
#include <numbers>

#include "qubus/analytics.hpp"
#include "qubus/gates.hpp"
#include "qubus/graphstab.hpp"
#include "qubus/growth.hpp"
#include "qubus/oracle/fock.hpp"
#include "qubus/oracle/statevector.hpp"

namespace qubus {
namespace {

constexpr double kPi = std::numbers::pi;

QubitState random_state(std::size_t n, Rng &rng) {
    std::vector<Complex> a(std::size_t{1} << n);
    for (auto &x : a) {
        x = Complex(2 * rng.uniform() - 1, 2 * rng.uniform() - 1);
    }
    QubitState s(n, a);
    s.normalize();
    return s;
}

Complex random_complex(Rng &rng, double scale) {
    return Complex(scale * (2 * rng.uniform() - 1), scale * (2 * rng.uniform() - 1));
}

// ---------------------------------------------------------------- busim

TEST(BusimProperty, NormAndClosureUnderRandomSequences) {
    Rng rng(1, 1);
    for (int trial = 0; trial < 200; trial++) {
        std::size_t n = 1 + rng.next() % 4;
        HybridState s = HybridState::from_qubits(random_state(n, rng), random_complex(rng, 3));
        for (int step = 0; step < 12; step++) {
            std::size_t q = rng.next() % n;
            switch (rng.next() % 3) {
                case 0:
                    s = apply_conditional_rotation(s, q, 2 * kPi * rng.uniform());
                    break;
                case 1:
                    s = apply_conditional_displacement(s, q, random_complex(rng, 2));
                    break;
                default:
                    s = apply_displacement(s, random_complex(rng, 2));
            }
            ASSERT_LE(s.branches().size(), std::size_t{1} << n);
            for (const auto &b : s.branches()) {
                ASSERT_TRUE(std::isfinite(b.bus.real()) && std::isfinite(b.bus.imag()));
            }
        }
        ASSERT_NEAR(s.norm(), 1.0, 1e-9) << trial;
    }
}

TEST(BusimProperty, AgreesWithFockOracle) {
    Rng rng(1, 2);
    for (int trial = 0; trial < 20; trial++) {
        std::size_t n = 1 + rng.next() % 3;
        HybridState s = HybridState::from_qubits(random_state(n, rng), random_complex(rng, 0.8));
        const std::size_t dim = 70;  // |beta|^2 stays below ~9 here
        oracle::FockState f = oracle::FockState::from_hybrid(s, dim);
        for (int step = 0; step < 6; step++) {
            std::size_t q = rng.next() % n;
            if (rng.bernoulli(0.5)) {
                double th = 2 * kPi * rng.uniform();
                s = apply_conditional_rotation(s, q, th);
                f.rotate(q, th);
            } else {
                Complex b = random_complex(rng, 0.4);
                s = apply_conditional_displacement(s, q, b);
                f.displace(q, b);
            }
        }
        EXPECT_GE(oracle::FockState::from_hybrid(s, dim).fidelity(f), 1 - 1e-9) << trial;
    }
}

TEST(BusimProperty, GeometricLoopPhase) {
    Rng rng(1, 3);
    for (int trial = 0; trial < 100; trial++) {
        Complex b1 = random_complex(rng, 2), b2 = random_complex(rng, 2), g = random_complex(rng, 3);
        HybridState s = HybridState::from_qubits(QubitState::plus(2), g);
        s = apply_conditional_displacement(s, 0, b1);
        s = apply_conditional_displacement(s, 1, b2);
        s = apply_conditional_displacement(s, 0, -b1);
        s = apply_conditional_displacement(s, 1, -b2);
        const double J = 2 * std::imag(std::conj(b1) * b2);
        for (const auto &br : s.branches()) {
            ASSERT_NEAR(std::abs(br.bus - g), 0.0, 1e-12);
            double s1 = z_sign(br.bits, 0, 2), s2 = z_sign(br.bits, 1, 2);
            ASSERT_NEAR(std::abs(br.coeff - 0.5 * std::polar(1.0, J * s1 * s2)), 0.0, 1e-12);
        }
    }
}

TEST(BusimProperty, PeakWeightsInvariantUnderGlobalDisplacement) {
    Rng rng(1, 4);
    for (int trial = 0; trial < 50; trial++) {
        HybridState s = HybridState::from_qubits(random_state(2, rng), 30.0);
        s = apply_conditional_rotation(s, 0, 0.2);
        s = apply_conditional_rotation(s, 1, 0.2);
        Complex shift = random_complex(rng, 50);
        PeakModel a = homodyne_pdf(s, kPi / 2);
        PeakModel b = homodyne_pdf(apply_displacement(s, shift), kPi / 2);
        ASSERT_EQ(a.peaks.size(), b.peaks.size());
        for (std::size_t k = 0; k < a.peaks.size(); k++) {
            EXPECT_NEAR(a.peaks[k].weight, b.peaks[k].weight, 1e-12);
            EXPECT_NEAR(b.peaks[k].center - a.peaks[k].center, quadrature_center(shift, kPi / 2), 1e-9);
        }
    }
}

// ---------------------------------------------------------------- gates

TEST(GatesProperty, ExhaustiveProbabilitiesAndSuccessFidelity) {
    Rng rng(2, 1);
    for (int trial = 0; trial < 30; trial++) {
        QubitState in2 = random_state(2, rng), in3 = random_state(3, rng);
        std::vector<GateTable> tables = {parity_momentum_table(1000, 0.003, in2),
                                         parity_position_table(1e6, 0.003, in2),
                                         parity_bucket_table(2.0, 0.4, in2, true),
                                         three_qubit_table(1000, 0.003, in3)};
        for (const auto &t : tables) {
            ASSERT_NEAR(t.total_probability(), 1.0, 1e-9) << t.gate;
        }
    }
    for (const auto &t : {parity_momentum_table(1000, 0.003, QubitState::plus(2)),
                          parity_bucket_table(20.0, 0.4, QubitState::plus(2), true),
                          three_qubit_table(1000, 0.003, QubitState::plus(3))}) {
        for (const auto &o : t.outcomes) {
            if (o.entangling && o.probability > 1e-12) {
                EXPECT_GE(o.fidelity, 1 - 1e-9) << t.gate << " " << o.label;
            }
        }
    }
}

TEST(GatesProperty, CascadeExactUpToTen) {
    for (std::size_t n = 2; n <= 10; n++) {
        auto [good, total] = cascade_success_count(n);
        // good / total == 1 - 2^{1-n}  <=>  good * 2^{n-1} == (2^{n-1} - 1) * total
        std::uint64_t half = std::uint64_t{1} << (n - 1);
        EXPECT_EQ(good * half, (half - 1) * total) << n;
    }
}

TEST(GatesProperty, SequencesReturnBusExactly) {
    Rng rng(2, 2);
    for (std::size_t n = 2; n <= 12; n++) {
        double beta = 0.1 + 2 * rng.uniform();
        auto star = star_sequence(n, beta);
        auto chain = chain_sequence(n, beta);
        for (auto *seq : {&star, &chain}) {
            HybridState s = seq->run(init_plus_state(n, random_complex(rng, 1)));
            EXPECT_EQ(bus_spread(s), 0.0) << n;
        }
    }
}

TEST(GatesProperty, ProbabilitiesIndependentOfAlphaTheta) {
    Rng rng(2, 3);
    QubitState in2 = random_state(2, rng), in3 = random_state(3, rng);
    auto a = parity_momentum_table(1000, 0.003, in2), b = parity_momentum_table(5000, 0.0011, in2);
    for (const auto &o : a.outcomes) {
        EXPECT_NEAR(o.probability, b.find(o.label).probability, 1e-12) << o.label;
    }
    auto c = three_qubit_table(1000, 0.003, in3), d = three_qubit_table(3000, 0.002, in3);
    for (const auto &o : c.outcomes) {
        EXPECT_NEAR(o.probability, d.find(o.label).probability, 1e-12) << o.label;
    }
    auto e = parity_position_table(1e6, 0.003, in2), f = parity_position_table(4e5, 0.005, in2);
    for (const auto &o : e.outcomes) {
        EXPECT_NEAR(o.probability, f.find(o.label).probability, 1e-12) << o.label;
    }
}

// ---------------------------------------------------------------- graphstab

TEST(GraphstabProperty, RandomCliffordAndMeasurementMatchDense) {
    Rng rng(3, 1);
    for (int trial = 0; trial < 150; trial++) {
        std::size_t n = 1 + rng.next() % 4;
        GraphSpec g(n);
        for (std::size_t u = 0; u < n; u++) {
            for (std::size_t v = u + 1; v < n; v++) {
                if (rng.bernoulli(0.5)) {
                    g.add_edge(u, v);
                }
            }
        }
        StabilizerTableau t = graph_state(g);
        auto d = oracle::DenseState::graph(g);
        for (int step = 0; step < 10; step++) {
            std::size_t q = rng.next() % n;
            switch (rng.next() % 6) {
                case 0:
                    t.h(q), d.h(q);
                    break;
                case 1:
                    t.s(q), d.s(q);
                    break;
                case 2:
                    t.x(q), d.x(q);
                    break;
                case 3:
                    if (n > 1) {
                        std::size_t r = (q + 1 + rng.next() % (n - 1)) % n;
                        t.cz(q, r), d.cz(q, r);
                    }
                    break;
                default: {
                    const char basis = "XYZ"[rng.next() % 3];
                    auto m = t.measure_single(q, basis, std::nullopt, &rng);
                    double p = d.project(PauliString::single(n, q, basis), m.outcome);
                    ASSERT_NEAR(p, m.probability, 1e-12);
                }
            }
            ASSERT_NO_THROW(t.validate());
        }
        ASSERT_GE(oracle::tableau_to_state(t).fidelity(d.state()), 1 - 1e-12) << trial;
    }
}

TEST(GraphstabProperty, FusionLengthLaw) {
    Rng rng(3, 2);
    for (int trial = 0; trial < 100; trial++) {
        std::size_t L1 = 1 + rng.next() % 12, L2 = 1 + rng.next() % 12;
        ClusterState cs = ClusterState::chains({L1, L2});
        auto r = cs.fuse({L1 - 1, L1}, FuseVariant::Parity2, std::string(rng.bernoulli(0.5) ? "odd" : "even"));
        ASSERT_TRUE(r.success);
        // Degree census: removing the dangling qubit leaves a path on L1 + L2 - 1 vertices.
        GraphSpec rest = cs.graph().without_vertex(L1);
        ASSERT_EQ(cs.graph().degree(L1), 1u);
        ASSERT_EQ(rest.vertex_count, L1 + L2 - 1);
        ASSERT_EQ(rest.edges.size(), L1 + L2 - 2);
        std::size_t ends = 0;
        for (std::size_t v = 0; v < rest.vertex_count; v++) {
            ASSERT_LE(rest.degree(v), 2u);
            ends += rest.degree(v) == 1 ? 1 : 0;
        }
        ASSERT_EQ(ends, L1 + L2 - 1 == 1 ? 0u : 2u);
        cs.apply_frame();
        ASSERT_TRUE(equals_up_to_corrections(cs.tableau(), cs.graph(), {}));
    }
}

TEST(GraphstabProperty, RepeatedRecoveryEndsInPlus) {
    Rng rng(3, 3);
    for (std::size_t L = 1; L <= 8; L++) {
        ClusterState cs(GraphSpec::chain(L));
        for (std::size_t i = 0; i + 1 < L; i++) {
            std::size_t end = rng.bernoulli(0.5) ? 0 : cs.qubit_count() - 1;
            cs.recover_failure(end, rng);
        }
        ASSERT_EQ(cs.qubit_count(), 1u);
        EXPECT_TRUE(cs.tableau().same_group(StabilizerTableau::from_strings({"X"}))) << L;
    }
}

// ---------------------------------------------------------------- growth

TEST(GrowthProperty, Conservation) {
    for (auto v : {Strategy::Sequential, Strategy::Merge, Strategy::DivideConquer, Strategy::VerticalLink}) {
        StrategyConfig c;
        c.variant = v;
        c.trials = 300;
        c.target_L = 25;
        c.rounds_k = v == Strategy::DivideConquer ? std::optional<int>(6) : std::nullopt;
        c.initial_qubits = 1000;
        auto s = simulate(c);
        for (const auto &t : s.trials) {
            double structure = v == Strategy::VerticalLink ? 0.0 : t.structure_qubits;
            ASSERT_NEAR(t.consumed, structure + t.wasted, 1e-9) << strategy_name(v);
        }
    }
}

TEST(GrowthProperty, OpsNonIncreasingInP) {
    // Merge pieces use a fixed L0 above every critical length on the grid; the
    // default L0 jumps with p and the operation count jumps with it.
    for (auto v : {Strategy::Sequential, Strategy::Merge, Strategy::VerticalLink}) {
        double prev = INFINITY;
        for (double p : {0.6, 0.7, 0.8, 0.9, 1.0}) {
            StrategyConfig c;
            c.variant = v;
            c.p = p;
            c.trials = 4000;
            c.target_L = 30;
            c.L0 = 4;
            double m = simulate(c).ops.mean;
            EXPECT_LE(m, prev) << strategy_name(v) << " p=" << p;
            prev = m;
        }
    }
}

TEST(GrowthProperty, DefaultMergePieceLengthBreaksMonotonicity) {
    // L0 drops from 3 to 2 between p = 0.6 and 0.7, so each piece adds only L0 - Lc.
    EXPECT_GT(merge_scaling(30, 0.7, minimal_length(0.7)).N_floor, merge_scaling(30, 0.6, minimal_length(0.6)).N_floor);
}

TEST(GrowthProperty, SequentialDriftAfterKRounds) {
    for (double p : {0.3, 0.5, 0.8}) {
        StrategyConfig c;
        c.p = p;
        c.rounds_k = 40;
        c.trials = 20000;
        c.master_seed = 77;
        auto rows = compare_to_analytic(simulate(c));
        ASSERT_EQ(rows.size(), 1u);
        EXPECT_LE(std::abs(rows[0].z), 3.5) << p;
    }
}

TEST(GrowthProperty, BitIdenticalStats) {
    StrategyConfig c;
    c.variant = Strategy::Merge;
    c.trials = 1000;
    c.target_L = 40;
    c.threads = 1;
    auto a = simulate(c);
    c.threads = 6;
    auto b = simulate(c);
    EXPECT_EQ(std::memcmp(&a.ops.mean, &b.ops.mean, sizeof(double)), 0);
    EXPECT_EQ(std::memcmp(&a.time.variance, &b.time.variance, sizeof(double)), 0);
}

// ---------------------------------------------------------------- analytics

TEST(AnalyticsProperty, JoinApproxConverges) {
    for (double p : {0.3, 0.5, 0.8}) {
        double prev = INFINITY;
        for (double L = 5; L <= 120; L += 5) {
            double diff = std::abs(join_yield(L, p, JoinMode::ExactSum) - join_yield(L, p, JoinMode::Approx));
            EXPECT_LE(diff, prev + 1e-12);
            prev = diff;
        }
        EXPECT_LT(prev, 1e-6);
    }
}

TEST(AnalyticsProperty, DcIdentities) {
    for (double p : {0.2, 0.5, 0.9}) {
        for (int k = 0; k <= 12; k++) {
            auto d = dc_scaling(k, p, 1e6);
            EXPECT_DOUBLE_EQ(d.Q, d.C * dc_length(k));
            EXPECT_DOUBLE_EQ(d.W, 1e6 - d.Q);
        }
    }
}

TEST(AnalyticsProperty, SequentialTimeForms) {
    for (double p : {0.55, 0.75, 0.95}) {
        for (double L : {2.0, 17.0, 300.0}) {
            EXPECT_DOUBLE_EQ(seq_scaling(L, p, 1.5).T, (L - 1) * 1.5 / p);
        }
    }
}

TEST(AnalyticsProperty, MergeBaseCase) { EXPECT_NEAR(merge_scaling(2, 0.75, 2).N_floor, 4.0 / 3.0, 1e-12); }

TEST(AnalyticsProperty, PureEvaluators) {
    EXPECT_EQ(merge_scaling(77, 0.5, 4).N_ceil, merge_scaling(77, 0.5, 4).N_ceil);
    EXPECT_EQ(dc_scaling(7, 0.6, 1e5).G, dc_scaling(7, 0.6, 1e5).G);
}

}  // namespace
}  // namespace qubus
