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

#include <set>

#include "qubus/rng.hpp"

namespace qubus {
namespace {

TEST(RngTest, SameSeedSameStream) {
    Rng a(42), b(42);
    for (int i = 0; i < 100; i++) {
        EXPECT_EQ(a.next(), b.next());
    }
}

TEST(RngTest, DerivedStreamsDiffer) {
    std::set<std::uint64_t> seeds;
    for (std::uint64_t i = 0; i < 1000; i++) {
        seeds.insert(derive_seed(7, i));
    }
    EXPECT_EQ(seeds.size(), 1000u);
    EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}

TEST(RngTest, UniformInUnitInterval) {
    Rng r(3, 9);
    double sum = 0;
    const int n = 200000;
    for (int i = 0; i < n; i++) {
        double u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / n, 0.5, 5 * std::sqrt(1.0 / 12 / n));
}

TEST(RngTest, BernoulliFrequency) {
    Rng r(11);
    const int n = 100000;
    int hits = 0;
    for (int i = 0; i < n; i++) {
        hits += r.bernoulli(0.3) ? 1 : 0;
    }
    EXPECT_NEAR(hits / double(n), 0.3, 5 * std::sqrt(0.21 / n));
}

TEST(RngTest, SignIsBalanced) {
    Rng r(5);
    int total = 0;
    for (int i = 0; i < 40000; i++) {
        int s = r.sign();
        ASSERT_TRUE(s == 1 || s == -1);
        total += s;
    }
    EXPECT_LT(std::abs(total), 5 * 200);
}

}  // namespace
}  // namespace qubus
