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

#include "qubus/growth.hpp"
#include "qubus/oracle/dc_floor.hpp"

namespace qubus {
namespace {

StrategyConfig config(Strategy v, std::uint64_t trials, std::uint64_t seed = 7) {
    StrategyConfig c;
    c.variant = v;
    c.trials = trials;
    c.master_seed = seed;
    return c;
}

const ComparisonRow &row(const std::vector<ComparisonRow> &rows, const std::string &metric) {
    for (const auto &r : rows) {
        if (r.metric == metric) {
            return r;
        }
    }
    throw std::out_of_range(metric);
}

TEST(StrategyTest, ParseNames) {
    EXPECT_EQ(parse_strategy("sequential"), Strategy::Sequential);
    EXPECT_EQ(parse_strategy("vertical"), Strategy::VerticalLink);
    EXPECT_EQ(parse_strategy("divide_conquer"), Strategy::DivideConquer);
    EXPECT_EQ(strategy_name(Strategy::Merge), "merge");
    EXPECT_THROW(parse_strategy("greedy"), std::invalid_argument);
}

TEST(StrategyTest, ValidationRejectsBadConfigs) {
    auto c = config(Strategy::Sequential, 10);
    c.p = 0.5;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c.max_ops = 1000;
    EXPECT_NO_THROW(c.validate());
    c.p = 1.5;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    auto d = config(Strategy::DivideConquer, 10);
    EXPECT_THROW(d.validate(), std::invalid_argument);
    auto m = config(Strategy::Merge, 10);
    m.p = 0.5;
    m.target_L = 3;
    EXPECT_THROW(m.validate(), std::invalid_argument);
    auto z = config(Strategy::VerticalLink, 0);
    EXPECT_THROW(z.validate(), std::invalid_argument);
}

TEST(SummaryTest, MeanVarianceStderr) {
    auto s = Summary::of({1, 2, 3, 4});
    EXPECT_DOUBLE_EQ(s.mean, 2.5);
    EXPECT_NEAR(s.variance, 5.0 / 3.0, 1e-15);
    EXPECT_NEAR(s.stderr_, std::sqrt(5.0 / 12.0), 1e-15);
    EXPECT_EQ(Summary::of({}).count, 0u);
}

TEST(SequentialTest, MeanOpsMatchesDriftLaw) {
    auto c = config(Strategy::Sequential, 20000);
    c.p = 0.75;
    c.target_L = 41;
    auto s = simulate(c);
    auto rows = compare_to_analytic(s);
    EXPECT_LE(std::abs(row(rows, "ops").z), 4.0);
    EXPECT_LE(std::abs(row(rows, "wasted").z), 4.0);
    // Every trial reaches the target exactly.
    for (const auto &t : s.trials) {
        ASSERT_EQ(t.final_length, 41);
        ASSERT_EQ(t.consumed - t.wasted, t.final_length);
    }
}

TEST(SequentialTest, TimeLawDiffersFromOpsTimesT) {
    auto c = config(Strategy::Sequential, 5000);
    c.target_L = 21;
    c.gate_time = 2;
    auto s = simulate(c);
    EXPECT_NEAR(s.time.mean, 2 * s.ops.mean, 1e-9);
    EXPECT_GT(std::abs(row(compare_to_analytic(s), "time").z), 3.0);
}

TEST(SequentialTest, ReseedFloorCountsReseeds) {
    auto c = config(Strategy::Sequential, 2000);
    c.p = 0.55;
    c.target_L = 5;
    c.floor = SequentialFloor::Reseed;
    auto s = simulate(c);
    EXPECT_GT(s.reseeds, 0u);
    for (const auto &t : s.trials) {
        ASSERT_EQ(t.final_length, 5);
    }
}

TEST(SequentialTest, CapStopsSubcriticalGrowth) {
    auto c = config(Strategy::Sequential, 200);
    c.p = 0.4;
    c.target_L = 30;
    c.max_ops = 500;
    auto s = simulate(c);
    EXPECT_GT(s.capped_trials, 0u);
}

TEST(SequentialTest, FixedRoundsDrift) {
    auto c = config(Strategy::Sequential, 20000);
    c.p = 0.6;
    c.rounds_k = 50;
    auto s = simulate(c);
    EXPECT_DOUBLE_EQ(s.ops.mean, 50);
    EXPECT_LE(std::abs(row(compare_to_analytic(s), "final_length").z), 4.0);
}

TEST(VerticalTest, MeanQubits) {
    for (double p : {0.75, 0.5, 0.25}) {
        auto c = config(Strategy::VerticalLink, 40000);
        c.p = p;
        auto rows = compare_to_analytic(simulate(c));
        EXPECT_LE(std::abs(row(rows, "consumed").z), 4.0) << p;
        EXPECT_LE(std::abs(row(rows, "ops").z), 4.0) << p;
    }
}

TEST(VerticalTest, CertainSuccessCostsFour) {
    auto c = config(Strategy::VerticalLink, 10);
    c.p = 1;
    auto s = simulate(c);
    EXPECT_DOUBLE_EQ(s.consumed.mean, 4);
    EXPECT_DOUBLE_EQ(s.consumed.variance, 0);
}

TEST(JoinPairTest, MatchesFiniteSum) {
    for (double p : {0.5, 0.75}) {
        auto js = join_pair_experiment(p, 6, 50000, 3);
        EXPECT_LE(std::abs(js.length.mean - js.exact), 4 * js.length.stderr_) << p;
    }
    EXPECT_THROW(join_pair_experiment(0.5, 0, 10, 1), std::invalid_argument);
}

TEST(DivideConquerTest, LiteralRuleMatchesExactFloorExpectation) {
    // Unpaired chains are discarded, so E[C[j]] falls below n(p/2)^j.
    const std::uint64_t n = 4096;
    for (double p : {0.5, 0.75}) {
        auto c = config(Strategy::DivideConquer, 4000, 11);
        c.p = p;
        c.rounds_k = 6;
        c.initial_qubits = n;
        auto s = simulate(c);
        auto exact = oracle::dc_floor_expectation(n, p, 6);
        for (int j = 0; j <= 6; j++) {
            const auto &sum = s.chains[j];
            double tol = 4 * sum.stderr_ + 1e-12;
            EXPECT_NEAR(sum.mean, exact[j], tol) << "p=" << p << " j=" << j;
        }
    }
}

TEST(DivideConquerTest, FloorBiasIsSystematic) {
    auto exact = oracle::dc_floor_expectation(65536, 0.5, 8);
    EXPECT_NEAR(exact[8], 5.0 / 6.0, 1e-4);
    EXPECT_NEAR(exact[1], 16384, 1e-5);
}

TEST(DivideConquerTest, AccountingIdentities) {
    auto c = config(Strategy::DivideConquer, 50);
    c.p = 0.6;
    c.rounds_k = 5;
    c.initial_qubits = 1000;
    auto s = simulate(c);
    for (const auto &t : s.trials) {
        ASSERT_EQ(t.chains.size(), 6u);
        ASSERT_DOUBLE_EQ(t.chains[0], 1000);
        for (int j = 1; j <= 5; j++) {
            ASSERT_LE(t.chains[j], std::floor(t.chains[j - 1] / 2));
        }
        ASSERT_DOUBLE_EQ(t.structure_qubits + t.wasted, 1000);
        ASSERT_DOUBLE_EQ(t.time, 5);
    }
}

TEST(MergeTest, ThreeQuarterOpsNearClosedForm) {
    auto c = config(Strategy::Merge, 4000);
    c.p = 0.75;
    c.target_L = 50;
    auto s = simulate(c);
    EXPECT_GT(s.final_length.mean, 0);
    EXPECT_LE(row(compare_to_analytic(s), "ops").relative, 0.25);
    for (const auto &t : s.trials) {
        ASSERT_LE(t.final_length, t.consumed);
    }
}

TEST(DeterminismTest, ThreadCountDoesNotChangeRecords) {
    for (auto v : {Strategy::Sequential, Strategy::Merge, Strategy::DivideConquer, Strategy::VerticalLink}) {
        auto c = config(v, 700, 99);
        c.rounds_k = v == Strategy::DivideConquer ? std::optional<int>(4) : std::nullopt;
        c.initial_qubits = 512;
        c.target_L = 20;
        c.threads = 1;
        auto a = simulate(c);
        c.threads = 5;
        auto b = simulate(c);
        ASSERT_EQ(a.trials.size(), b.trials.size());
        for (std::size_t i = 0; i < a.trials.size(); i++) {
            ASSERT_EQ(a.trials[i].ops, b.trials[i].ops);
            ASSERT_EQ(a.trials[i].consumed, b.trials[i].consumed);
            ASSERT_EQ(a.trials[i].seed, b.trials[i].seed);
        }
        EXPECT_EQ(a.ops.mean, b.ops.mean);
    }
}

TEST(CompareTest, ZeroVarianceExactMatch) {
    Summary s = Summary::of({4, 4, 4});
    auto r = compare_value("consumed", s, {"consumed", 4, "x"});
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.z, 0);
    auto bad = compare_value("consumed", s, {"consumed", 5, "x"});
    EXPECT_FALSE(bad.pass);
}

}  // namespace
}  // namespace qubus
