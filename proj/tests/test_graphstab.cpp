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

#include "qubus/graphstab.hpp"
#include "qubus/oracle/statevector.hpp"

namespace qubus {
namespace {

bool matches_dense(const StabilizerTableau &tab, const oracle::DenseState &d) {
    return oracle::tableau_to_state(tab).fidelity(d.state()) >= 1 - 1e-12;
}

TEST(PauliStringTest, ParseAndPrint) {
    auto p = PauliString::from_string("-XZIY");
    EXPECT_EQ(p.size(), 4u);
    EXPECT_EQ(p.sign(), -1);
    EXPECT_EQ(p.str(), "-XZIY");
    EXPECT_THROW(PauliString::from_string("XQ"), std::invalid_argument);
}

TEST(PauliStringTest, CommutationAndProducts) {
    auto x = PauliString::from_string("XI");
    auto z = PauliString::from_string("ZI");
    EXPECT_FALSE(x.commutes(z));
    EXPECT_TRUE(PauliString::from_string("XX").commutes(PauliString::from_string("ZZ")));
    // XZ = -iY.
    auto xz = x.times(z);
    EXPECT_TRUE(xz.same_operator(PauliString::from_string("YI")));
    EXPECT_FALSE(xz.hermitian());
    auto zz = PauliString::from_string("ZZ");
    auto prod = zz.times(zz);
    EXPECT_TRUE(prod.weight_zero());
    EXPECT_EQ(prod.sign(), +1);
}

TEST(GraphSpecTest, EdgesAndNeighbours) {
    GraphSpec g = GraphSpec::chain(4);
    EXPECT_TRUE(g.has_edge(1, 2));
    EXPECT_FALSE(g.has_edge(0, 2));
    EXPECT_EQ(g.degree(1), 2u);
    EXPECT_THROW(g.add_edge(1, 1), std::invalid_argument);
    EXPECT_THROW(g.add_edge(0, 9), std::out_of_range);
    GraphSpec r = g.without_vertex(1);
    EXPECT_EQ(r.vertex_count, 3u);
    EXPECT_TRUE(r.has_edge(1, 2));
    EXPECT_EQ(r.edges.size(), 1u);
}

TEST(GraphSpecTest, EdgeListRoundTrip) {
    GraphSpec g = parse_edge_list("0 1\n1 2\n# comment\n2 3\n");
    EXPECT_EQ(g, GraphSpec::chain(4));
    EXPECT_EQ(parse_edge_list(to_edge_list(GraphSpec::star(5)), 5), GraphSpec::star(5));
    EXPECT_THROW(parse_edge_list("0 x"), std::invalid_argument);
}

TEST(TableauTest, GraphStateGenerators) {
    StabilizerTableau t = graph_state(GraphSpec::chain(3));
    EXPECT_EQ(t.generators()[1].str(), "+ZXZ");
    EXPECT_EQ(t.rank(), 3u);
    EXPECT_NO_THROW(t.validate());
    EXPECT_EQ(t.expectation(PauliString::from_string("ZXZ")), 1);
    EXPECT_EQ(t.expectation(PauliString::from_string("XXI")), 0);
    EXPECT_EQ(t.expectation(PauliString::from_string("-XZI")), -1);
}

TEST(TableauTest, ValidationRejectsBadInput) {
    EXPECT_THROW(StabilizerTableau::from_strings({"XI", "ZI"}), std::invalid_argument);
    EXPECT_THROW(StabilizerTableau::from_strings({"ZI", "ZI"}), std::invalid_argument);
    EXPECT_THROW(StabilizerTableau::from_strings({"XZ"}), std::invalid_argument);
}

TEST(TableauTest, CliffordGatesMatchDense) {
    StabilizerTableau t = StabilizerTableau::zeros(3);
    oracle::DenseState d(3);
    t.h(0), d.h(0);
    t.cnot(0, 1);
    d.h(1), d.cz(0, 1), d.h(1);
    t.s(1), d.s(1);
    t.cz(1, 2), d.cz(1, 2);
    t.h(2), d.h(2);
    t.x(0), d.x(0);
    t.z(2), d.z(2);
    EXPECT_TRUE(matches_dense(t, d));
}

TEST(TableauTest, SameGroupIgnoresGeneratorChoice) {
    auto a = StabilizerTableau::from_strings({"XX", "ZZ"});
    auto b = StabilizerTableau::from_strings({"-YY", "ZZ"});
    EXPECT_TRUE(a.same_group(b));
    auto c = StabilizerTableau::from_strings({"XX", "-ZZ"});
    EXPECT_FALSE(a.same_group(c));
}

TEST(TableauTest, MeasurementProbabilities) {
    StabilizerTableau t = graph_state(GraphSpec::chain(2));
    auto m = t.measure_single(0, 'X', +1);
    EXPECT_NEAR(m.probability, 0.5, 1e-15);
    EXPECT_FALSE(m.deterministic);
    auto again = t.measure_single(0, 'X');
    EXPECT_TRUE(again.deterministic);
    EXPECT_EQ(again.outcome, +1);
    EXPECT_THROW(t.measure_single(0, 'X', -1), std::domain_error);
}

TEST(TableauTest, SampledMeasurementNeedsRng) {
    StabilizerTableau t = graph_state(GraphSpec::chain(2));
    EXPECT_THROW(t.measure_single(0, 'Z'), std::invalid_argument);
    Rng rng(1);
    int plus = 0;
    for (int i = 0; i < 2000; i++) {
        StabilizerTableau u = t;
        plus += u.measure_single(0, 'Z', std::nullopt, &rng).outcome > 0 ? 1 : 0;
    }
    EXPECT_NEAR(plus / 2000.0, 0.5, 0.06);
}

TEST(GraphRulesTest, ZMeasurementDeletesVertex) {
    StabilizerTableau t = graph_state(GraphSpec::chain(4));
    t.measure_single(1, 'Z', +1);
    t.remove_qubit(1);
    GraphSpec want(3);
    want.add_edge(1, 2);
    EXPECT_TRUE(equals_up_to_corrections(t, want, {}));
}

TEST(GraphRulesTest, ZMinusOutcomeNeedsNeighbourZ) {
    StabilizerTableau t = graph_state(GraphSpec::chain(3));
    t.measure_single(2, 'Z', -1);
    t.remove_qubit(2);
    EXPECT_FALSE(equals_up_to_corrections(t, GraphSpec::chain(2), {}));
    EXPECT_TRUE(equals_up_to_corrections(t, GraphSpec::chain(2), {LocalCorrection::pauli_z(1)}));
    auto frame = graph_frame_corrections(t, GraphSpec::chain(2));
    ASSERT_TRUE(frame.has_value());
    ASSERT_EQ(frame->size(), 1u);
    EXPECT_EQ((*frame)[0], LocalCorrection::pauli_z(1));
}

TEST(GraphRulesTest, GhzIsLocallyAStar) {
    auto ghz = StabilizerTableau::from_strings({"XXX", "ZZI", "IZZ"});
    EXPECT_TRUE(equals_up_to_corrections(
        ghz, GraphSpec::star(3), {LocalCorrection::hadamard(1), LocalCorrection::hadamard(2)}));
    EXPECT_FALSE(equals_up_to_corrections(ghz, GraphSpec::chain(3), {}));
}

TEST(GraphRulesTest, PhaseStateConversion) {
    oracle::DenseState d = oracle::DenseState::graph(GraphSpec::star(4));
    StabilizerTableau t = tableau_from_phase_state(d.state());
    EXPECT_TRUE(t.same_group(graph_state(GraphSpec::star(4))));
}

TEST(ClusterTest, ParityFusionJoinsChains) {
    ClusterState cs = ClusterState::chains({3, 4});
    auto r = cs.fuse({2, 3}, FuseVariant::Parity2, std::string("odd"));
    EXPECT_TRUE(r.success);
    EXPECT_NEAR(r.probability, 0.5, 1e-15);
    cs.apply_frame();
    // Chain 0-1-2-4-5-6 with 3 hanging off 2.
    EXPECT_TRUE(cs.graph().has_edge(2, 4));
    EXPECT_TRUE(cs.graph().has_edge(2, 3));
    EXPECT_EQ(cs.graph().degree(3), 1u);
    EXPECT_TRUE(equals_up_to_corrections(cs.tableau(), cs.graph(), {}));
}

TEST(ClusterTest, FailedFusionShrinksChains) {
    ClusterState cs = ClusterState::chains({3, 3});
    auto r = cs.fuse({2, 3}, FuseVariant::Parity2, std::string("product-11"));
    EXPECT_FALSE(r.success);
    ASSERT_EQ(r.measured.size(), 2u);
    cs.recover_failure(3);
    cs.recover_failure(2);
    EXPECT_EQ(cs.qubit_count(), 4u);
    EXPECT_TRUE(equals_up_to_corrections(cs.tableau(), ClusterState::chains({2, 2}).graph(), {}));
}

TEST(ClusterTest, GhzFusionMakesTJunction) {
    ClusterState cs = ClusterState::chains({2, 2, 2});
    auto r = cs.fuse({1, 2, 4}, FuseVariant::Gate3, std::string("ghz"));
    EXPECT_TRUE(r.success);
    EXPECT_NEAR(r.probability, 0.25, 1e-15);
    cs.apply_frame();
    // Arms 0, 3 and 5 plus the two absorbed qubits 2 and 4 as leaves.
    EXPECT_EQ(cs.graph().degree(1), 5u);
    EXPECT_EQ(cs.graph().degree(2), 1u);
    EXPECT_EQ(cs.graph().degree(4), 1u);
    EXPECT_TRUE(equals_up_to_corrections(cs.tableau(), cs.graph(), {}));
}

TEST(ClusterTest, FusionRejectsBadQubits) {
    ClusterState cs = ClusterState::chains({3, 3});
    EXPECT_THROW(cs.fuse({1, 2}, FuseVariant::Parity2, std::string("odd")), std::invalid_argument);
    EXPECT_THROW(cs.fuse({2, 3}, FuseVariant::Parity2, std::string("ghz")), std::invalid_argument);
    EXPECT_THROW(cs.fuse({2, 3}, FuseVariant::Parity2), std::invalid_argument);
    EXPECT_THROW(cs.fuse({2, 3, 4}, FuseVariant::Parity2, std::string("odd")), std::invalid_argument);
}

TEST(ClusterTest, RecoverFailureRejectsInteriorQubit) {
    ClusterState cs(GraphSpec::chain(4));
    EXPECT_THROW(cs.recover_failure(1), std::invalid_argument);
}

TEST(ClusterTest, SampledFusionOutcomesFollowProbabilities) {
    Rng rng(2024);
    int successes = 0;
    const int n = 4000;
    for (int i = 0; i < n; i++) {
        ClusterState cs = ClusterState::chains({2, 2});
        successes += cs.fuse({1, 2}, FuseVariant::Parity2, std::nullopt, &rng).success ? 1 : 0;
    }
    EXPECT_NEAR(successes / double(n), 0.5, 5 * std::sqrt(0.25 / n));
}

}  // namespace
}  // namespace qubus
