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

#include <gtest/gtest.h>

#include <map>
#include <numbers>

#include "qubus/gates.hpp"
#include "qubus/oracle/quadrature.hpp"

namespace qubus {
namespace {

constexpr double kPi = std::numbers::pi;

QubitState random_state(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Complex> a(std::size_t{1} << n);
    for (auto &x : a) {
        x = Complex(2 * rng.uniform() - 1, 2 * rng.uniform() - 1);
    }
    QubitState s(n, a);
    s.normalize();
    return s;
}

double weight(const QubitState &s, std::initializer_list<Bits> members) {
    double w = 0;
    for (Bits b : members) {
        w += std::norm(s.amplitudes[b]);
    }
    return w;
}

TEST(ErrorBudgetTest, ReferenceValues) {
    // Quoted reference 3.4e-6 is the small-angle value Q(alpha theta^2 / 2) = Q(4.5).
    auto b = error_budget(1e6, 0.003);
    EXPECT_NEAR(b.p_err_position / 3.3976731247300535e-6, 1.0, 1e-4);
    EXPECT_NEAR(b.p_err_position, oracle::normal_lower_mass(0, -1e6 * (1 - std::cos(0.003))), 1e-15);
    auto m = error_budget(1000, 0.003);
    EXPECT_NEAR(m.p_err_momentum, oracle::normal_lower_mass(0, -1000 * std::sin(0.003)), 1e-12);
    EXPECT_NEAR(error_budget(2 / 0.003, 0.003).p_err_vacuum, std::exp(-16.0), 1e-20);
}

TEST(ErrorBudgetTest, DegenerateRegimeWarns) {
    auto b = error_budget(1, 0);
    EXPECT_DOUBLE_EQ(b.p_err_momentum, 0.5);
    EXPECT_FALSE(b.regime_ok);
    EXPECT_FALSE(b.warnings.empty());
    EXPECT_THROW(error_budget(0, 0.1), std::invalid_argument);
}

TEST(ParityMomentumTest, PlusInputProbabilities) {
    auto t = parity_momentum_table(1000, 0.003, QubitState::plus(2));
    EXPECT_NEAR(t.find("odd-bell").probability, 0.5, 1e-12);
    EXPECT_NEAR(t.find("product-00").probability, 0.25, 1e-12);
    EXPECT_NEAR(t.find("product-11").probability, 0.25, 1e-12);
    EXPECT_NEAR(t.success_probability(), 0.5, 1e-12);
    EXPECT_TRUE(t.find("odd-bell").entangling);
    EXPECT_FALSE(t.find("product-00").entangling);
}

TEST(ParityMomentumTest, ArbitraryInputKeepsCoherence) {
    QubitState in = random_state(2, 17);
    auto t = parity_momentum_table(1000, 0.003, in);
    const auto &odd = t.find("odd-bell");
    EXPECT_NEAR(odd.probability, weight(in, {0b01, 0b10}), 1e-12);
    // Posterior is the odd-subspace projection of the input up to local corrections.
    QubitState proj(2, {0, in.amplitudes[1], in.amplitudes[2], 0});
    proj.normalize();
    EXPECT_NEAR(odd.posterior.fidelity(proj), 1.0, 1e-12);
    EXPECT_NEAR(t.total_probability(), 1.0, 1e-12);
}

TEST(ParityMomentumTest, WindowProbabilityIncludesTails) {
    auto t = parity_momentum_table(100, 0.01, QubitState::plus(2));
    double w = 0;
    for (const auto &o : t.outcomes) {
        w += o.window_probability;
    }
    EXPECT_NEAR(w, 1.0, 1e-12);
    EXPECT_GT(t.peak_leakage, 0.0);
    EXPECT_LT(t.find("odd-bell").window_probability, 0.5);
}

TEST(ParityPositionTest, EvenAndOddBell) {
    auto t = parity_position_table(1e6, 0.003, QubitState::plus(2));
    EXPECT_NEAR(t.find("even-bell").probability, 0.5, 1e-12);
    EXPECT_NEAR(t.find("odd-bell").probability, 0.5, 1e-12);
    EXPECT_GE(t.find("even-bell").fidelity, 1 - 1e-12);
    EXPECT_GE(t.find("odd-bell").fidelity, 1 - 1e-12);
}

TEST(ParityBucketTest, VacuumHeraldsOddBell) {
    auto t = parity_bucket_table(1000, 0.003, QubitState::plus(2), false);
    const auto &v = t.find("odd-bell");
    EXPECT_NEAR(v.probability, 0.5, 1e-12);
    EXPECT_GE(v.posterior.fidelity(states::odd_bell()), 1 - 1e-12);
    const auto &c = t.find("click");
    EXPECT_FALSE(c.mixture.empty());
    EXPECT_NEAR(t.total_probability(), 1.0, 1e-9);
}

TEST(ParityBucketTest, VacuumProbabilityClosedForm) {
    // Even branches end at distance 2 alpha sin(theta) from the vacuum.
    const double alpha = 3.0, theta = 0.2;
    auto t = parity_bucket_table(alpha, theta, QubitState::plus(2), true);
    double even_vac = std::exp(-4 * alpha * alpha * std::sin(theta) * std::sin(theta));
    EXPECT_NEAR(t.find("odd-bell").probability, 0.5 + 0.5 * even_vac, 1e-12);
}

TEST(ParityBucketTest, ResolvingPosteriorsAlternateParity) {
    auto t = parity_bucket_table(3.0, 0.2, QubitState::plus(2), true);
    int seen = 0;
    for (const auto &o : t.outcomes) {
        if (o.label.rfind("even-bell-", 0) == 0 && o.probability > 1e-10) {
            EXPECT_GE(o.fidelity, 1 - 1e-12) << o.label;
            seen++;
        }
    }
    EXPECT_GT(seen, 5);
    EXPECT_NEAR(t.total_probability(), 1.0, 1e-12);
}

TEST(ThreeQubitTest, OutcomeTable) {
    auto t = three_qubit_table(1000, 0.003, QubitState::plus(3));
    std::map<std::string, double> want{{"ghz", 0.25},
                                       {"bell-q3-0", 0.25},
                                       {"bell-q3-1", 0.25},
                                       {"product-001", 0.125},
                                       {"product-110", 0.125}};
    ASSERT_EQ(t.outcomes.size(), want.size());
    for (const auto &[label, p] : want) {
        EXPECT_NEAR(t.find(label).probability, p, 1e-12) << label;
        EXPECT_GE(t.find(label).fidelity, 1 - 1e-12) << label;
    }
    EXPECT_NEAR(t.success_probability(), 0.75, 1e-12);
}

TEST(ThreeQubitTest, SamplingFrequencies) {
    auto t = three_qubit_table(1000, 0.003, QubitState::plus(3));
    Rng rng(99);
    std::map<std::string, int> counts;
    const int n = 40000;
    for (int i = 0; i < n; i++) {
        counts[select_outcome(t, {std::nullopt, &rng}).label]++;
    }
    EXPECT_NEAR(counts["ghz"] / double(n), 0.25, 5 * std::sqrt(0.1875 / n));
    EXPECT_NEAR(counts["product-110"] / double(n), 0.125, 5 * std::sqrt(0.11 / n));
    EXPECT_EQ(select_outcome(t, {std::string("ghz"), nullptr}).label, "ghz");
    EXPECT_THROW(select_outcome(t, {}), std::invalid_argument);
}

class CascadeTest : public ::testing::TestWithParam<std::size_t> {};

TEST_P(CascadeTest, SuccessLawAndTime) {
    const std::size_t n = GetParam();
    auto [good, total] = cascade_success_count(n);
    EXPECT_EQ(total, std::uint64_t{1} << n);
    EXPECT_EQ(good, total - 2);
    auto t = cascaded_table(n, 1000, 0.003);
    EXPECT_NEAR(t.success_probability(), 1 - std::ldexp(1.0, 1 - int(n)), 1e-12);
    EXPECT_NEAR(t.gate_time, std::ldexp(1.0, int(n) - 1), 1e-12);
    EXPECT_NEAR(t.total_probability(), 1.0, 1e-12);
}

INSTANTIATE_TEST_SUITE_P(N2to8, CascadeTest, ::testing::Values(2, 3, 4, 5, 6, 7, 8));

TEST(GeometricTest, CzOnRandomInputs) {
    const double b = std::sqrt(kPi / 8);
    for (std::uint64_t seed = 1; seed <= 10; seed++) {
        QubitState in = random_state(2, seed);
        auto r = geometric_cz(Complex(0, b), b, in, Complex(0.3, -0.2));
        EXPECT_TRUE(r.is_cz);
        EXPECT_LT(r.bus_spread, 1e-12);
        EXPECT_GE(r.corrected.fidelity(apply_cz(in, 0, 1)), 1 - 1e-12);
    }
}

TEST(GeometricTest, NonCzCouplingIsReported) {
    auto r = geometric_cz(Complex(0, 0.3), 0.3, QubitState::plus(2));
    EXPECT_FALSE(r.is_cz);
    // J = 2 Im(conj(0.3 i) 0.3).
    EXPECT_NEAR(r.coupling, -0.18, 1e-14);
}

TEST(CompileTest, NetDisplacementAndExactness) {
    auto c = compile_conditional_displacement(2.0, 0.4, 0);
    EXPECT_NEAR(std::abs(c.net - Complex(0, 4 * std::sin(0.4))), 0.0, 1e-15);
    EXPECT_EQ(c.sequence.steps.size(), 5u);
    EXPECT_LT(std::abs(c.residual_phase), 1e-12);
}

TEST(SequenceTest, StarAndChainGraphs) {
    const double b = std::sqrt(kPi / 8);
    for (std::size_t n = 2; n <= 6; n++) {
        auto s = star_sequence(n, b);
        EXPECT_TRUE(check_sequence(s, GraphSpec::star(n)).stabilizer_pass) << n;
        auto c = chain_sequence(n, b);
        auto cc = check_sequence(c, GraphSpec::chain(n));
        EXPECT_TRUE(cc.stabilizer_pass) << n;
        EXPECT_LT(cc.bus_spread, 1e-12);
    }
}

TEST(SequenceTest, WrongGraphFails) {
    const double b = std::sqrt(kPi / 8);
    auto c = chain_sequence(4, b);
    EXPECT_FALSE(check_sequence(c, GraphSpec::star(4)).stabilizer_pass);
}

TEST(SequenceTest, WrongAmplitudeFails) {
    auto c = chain_sequence(3, 0.5);
    EXPECT_FALSE(check_sequence(c, GraphSpec::chain(3)).stabilizer_pass);
}

}  // namespace
}  // namespace qubus
