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

#include <numbers>

#include "qubus/qubit_state.hpp"

namespace qubus {
namespace {

TEST(BitsTest, QubitZeroIsMostSignificant) {
    EXPECT_TRUE(bit_of(0b100, 0, 3));
    EXPECT_FALSE(bit_of(0b100, 2, 3));
    EXPECT_EQ(flip_bit(0b000, 0, 3), 0b100u);
    EXPECT_EQ(z_sign(0b01, 0, 2), +1);
    EXPECT_EQ(z_sign(0b01, 1, 2), -1);
    EXPECT_EQ(bits_to_string(0b011, 3), "011");
    EXPECT_EQ(bits_from_string("101"), 0b101u);
    EXPECT_THROW(bits_from_string("12"), std::invalid_argument);
}

TEST(QubitStateTest, ConstructionValidatesDimension) {
    EXPECT_THROW(QubitState(2, std::vector<Complex>(3)), std::invalid_argument);
    QubitState p = QubitState::plus(3);
    EXPECT_NEAR(p.norm(), 1.0, 1e-15);
    EXPECT_EQ(p.dim(), 8u);
}

TEST(QubitStateTest, PauliCorrections) {
    QubitState s = QubitState::basis("00");
    s.apply(LocalCorrection::pauli_x(1));
    EXPECT_NEAR(s.fidelity(QubitState::basis("01")), 1.0, 1e-15);
    s.apply(LocalCorrection::hadamard(0));
    QubitState want = QubitState::superposition(2, {{0b01, 1.0}, {0b11, 1.0}});
    EXPECT_NEAR(s.fidelity(want), 1.0, 1e-15);
    s.apply(LocalCorrection::pauli_z(0));
    QubitState minus = QubitState::superposition(2, {{0b01, 1.0}, {0b11, -1.0}});
    EXPECT_NEAR(s.fidelity(minus), 1.0, 1e-15);
}

TEST(QubitStateTest, PhaseCorrectionIsDiagonal) {
    QubitState s = QubitState::plus(1);
    s.apply(LocalCorrection::phase(0, std::numbers::pi / 2));
    EXPECT_NEAR(std::abs(s.amplitudes[1] / s.amplitudes[0] - Complex(0, 1)), 0.0, 1e-15);
}

TEST(QubitStateTest, TensorProduct) {
    QubitState a = QubitState::basis("1");
    QubitState b = QubitState::plus(1);
    QubitState t = a.tensor(b);
    EXPECT_EQ(t.qubit_count, 2u);
    EXPECT_NEAR(std::norm(t.amplitudes[0b10]), 0.5, 1e-15);
    EXPECT_NEAR(std::norm(t.amplitudes[0b11]), 0.5, 1e-15);
}

TEST(QubitStateTest, NamedStates) {
    EXPECT_NEAR(states::odd_bell().norm(), 1.0, 1e-15);
    EXPECT_NEAR(std::norm(states::ghz(3).amplitudes[7]), 0.5, 1e-15);
    EXPECT_NEAR(states::even_bell(0).fidelity(states::even_bell(1)), 0.0, 1e-15);
}

TEST(QubitStateTest, DiagonalPhaseCorrectionsRecoverTarget) {
    QubitState target = states::even_bell(0);
    QubitState s = target;
    s.apply(LocalCorrection::phase(0, 0.7));
    s.apply(LocalCorrection::phase(1, -1.9));
    Corrections cs;
    ASSERT_TRUE(diagonal_phase_corrections(s, target, cs));
    EXPECT_NEAR(s.corrected(cs).fidelity(target), 1.0, 1e-12);
}

TEST(QubitStateTest, DiagonalPhaseCorrectionsRejectWrongSupport) {
    Corrections cs;
    EXPECT_FALSE(diagonal_phase_corrections(states::odd_bell(), states::even_bell(0), cs));
}

}  // namespace
}  // namespace qubus
