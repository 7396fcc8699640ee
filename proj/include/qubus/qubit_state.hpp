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

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace qubus {

using Complex = std::complex<double>;

/// Bit pattern of a register. Qubit 0 is the most significant bit, so the
/// pattern printed as "01" (qubit 0 = 0, qubit 1 = 1) has value 1.
using Bits = std::uint64_t;

inline constexpr std::size_t kMaxQubits = 24;

inline bool bit_of(Bits bits, std::size_t q, std::size_t n) {
    return ((bits >> (n - 1 - q)) & 1U) != 0;
}

inline Bits flip_bit(Bits bits, std::size_t q, std::size_t n) {
    return bits ^ (Bits{1} << (n - 1 - q));
}

/// +1 for |0>, -1 for |1>: the sigma_z eigenvalue of qubit q.
inline int z_sign(Bits bits, std::size_t q, std::size_t n) {
    return bit_of(bits, q, n) ? -1 : +1;
}

inline std::string bits_to_string(Bits bits, std::size_t n) {
    std::string out(n, '0');
    for (std::size_t q = 0; q < n; q++) {
        if (bit_of(bits, q, n)) {
            out[q] = '1';
        }
    }
    return out;
}

inline Bits bits_from_string(const std::string &text) {
    Bits bits = 0;
    for (char c : text) {
        if (c != '0' && c != '1') {
            throw std::invalid_argument("bit pattern must contain only 0/1: " + text);
        }
        bits = (bits << 1) | static_cast<Bits>(c == '1');
    }
    return bits;
}

/// Single-qubit local correction. Phase(angle) is diag(1, e^{i angle}).
struct LocalCorrection {
    enum class Kind { X, Y, Z, H, Phase };
    std::size_t qubit = 0;
    Kind kind = Kind::Z;
    double angle = 0.0;

    static LocalCorrection pauli_x(std::size_t q) { return {q, Kind::X, 0.0}; }
    static LocalCorrection pauli_y(std::size_t q) { return {q, Kind::Y, 0.0}; }
    static LocalCorrection pauli_z(std::size_t q) { return {q, Kind::Z, 0.0}; }
    static LocalCorrection hadamard(std::size_t q) { return {q, Kind::H, 0.0}; }
    static LocalCorrection phase(std::size_t q, double angle) { return {q, Kind::Phase, angle}; }

    bool operator==(const LocalCorrection &) const = default;

    std::string str() const {
        std::string q = std::to_string(qubit);
        switch (kind) {
            case Kind::X:
                return "X" + q;
            case Kind::Y:
                return "Y" + q;
            case Kind::Z:
                return "Z" + q;
            case Kind::H:
                return "H" + q;
            case Kind::Phase:
                return "P" + q + "(" + std::to_string(angle) + ")";
        }
        return "?";
    }
};

using Corrections = std::vector<LocalCorrection>;

/// Dense pure state of a qubit register.
struct QubitState {
    std::size_t qubit_count = 0;
    std::vector<Complex> amplitudes;

    QubitState() = default;

    QubitState(std::size_t n, std::vector<Complex> amps) : qubit_count(n), amplitudes(std::move(amps)) {
        if (n == 0 || n > kMaxQubits) {
            throw std::invalid_argument("qubit count out of range");
        }
        if (amplitudes.size() != (std::size_t{1} << n)) {
            throw std::invalid_argument("amplitude vector length must be 2^n");
        }
    }

    static QubitState basis(std::size_t n, Bits bits) {
        std::vector<Complex> amps(std::size_t{1} << n);
        amps.at(bits) = 1.0;
        return {n, std::move(amps)};
    }

    static QubitState basis(const std::string &pattern) {
        return basis(pattern.size(), bits_from_string(pattern));
    }

    static QubitState plus(std::size_t n) {
        std::size_t dim = std::size_t{1} << n;
        return {n, std::vector<Complex>(dim, Complex(1.0 / std::sqrt(static_cast<double>(dim)), 0.0))};
    }

    /// Equal-weight superposition of the listed patterns with the given relative signs/phases.
    static QubitState superposition(std::size_t n, const std::vector<std::pair<Bits, Complex>> &terms) {
        std::vector<Complex> amps(std::size_t{1} << n);
        for (const auto &[bits, coeff] : terms) {
            amps.at(bits) += coeff;
        }
        QubitState s(n, std::move(amps));
        s.normalize();
        return s;
    }

    std::size_t dim() const { return amplitudes.size(); }

    double norm() const {
        double total = 0;
        for (const auto &a : amplitudes) {
            total += std::norm(a);
        }
        return std::sqrt(total);
    }

    void normalize() {
        double n = norm();
        if (!(n > 0)) {
            throw std::domain_error("cannot normalize a zero state");
        }
        for (auto &a : amplitudes) {
            a /= n;
        }
    }

    Complex inner(const QubitState &other) const {
        if (other.qubit_count != qubit_count) {
            throw std::invalid_argument("qubit count mismatch");
        }
        Complex total = 0;
        for (std::size_t i = 0; i < amplitudes.size(); i++) {
            total += std::conj(amplitudes[i]) * other.amplitudes[i];
        }
        return total;
    }

    /// |<this|other>|^2 for normalized states.
    double fidelity(const QubitState &other) const { return std::norm(inner(other)); }

    void apply(const LocalCorrection &c) {
        if (c.qubit >= qubit_count) {
            throw std::out_of_range("correction qubit out of range");
        }
        const std::size_t n = qubit_count;
        const double r = 1.0 / std::numbers::sqrt2;
        for (std::size_t i = 0; i < amplitudes.size(); i++) {
            if (bit_of(i, c.qubit, n)) {
                continue;
            }
            std::size_t j = flip_bit(i, c.qubit, n);
            Complex a0 = amplitudes[i];
            Complex a1 = amplitudes[j];
            switch (c.kind) {
                case LocalCorrection::Kind::X:
                    amplitudes[i] = a1;
                    amplitudes[j] = a0;
                    break;
                case LocalCorrection::Kind::Y:
                    amplitudes[i] = Complex(0, -1) * a1;
                    amplitudes[j] = Complex(0, 1) * a0;
                    break;
                case LocalCorrection::Kind::Z:
                    amplitudes[j] = -a1;
                    break;
                case LocalCorrection::Kind::H:
                    amplitudes[i] = r * (a0 + a1);
                    amplitudes[j] = r * (a0 - a1);
                    break;
                case LocalCorrection::Kind::Phase:
                    amplitudes[j] = a1 * std::polar(1.0, c.angle);
                    break;
            }
        }
    }

    void apply(const Corrections &cs) {
        for (const auto &c : cs) {
            apply(c);
        }
    }

    QubitState corrected(const Corrections &cs) const {
        QubitState out = *this;
        out.apply(cs);
        return out;
    }

    /// Kronecker product; `this` supplies the leading (most significant) qubits.
    QubitState tensor(const QubitState &other) const {
        std::vector<Complex> amps(dim() * other.dim());
        for (std::size_t i = 0; i < dim(); i++) {
            for (std::size_t j = 0; j < other.dim(); j++) {
                amps[i * other.dim() + j] = amplitudes[i] * other.amplitudes[j];
            }
        }
        return {qubit_count + other.qubit_count, std::move(amps)};
    }
};

namespace states {

inline QubitState odd_bell() { return QubitState::superposition(2, {{0b01, 1.0}, {0b10, 1.0}}); }

/// (|00> + sign |11>)/sqrt2 with sign = (-1)^n.
inline QubitState even_bell(int parity_index = 0) {
    double sign = (parity_index % 2 == 0) ? 1.0 : -1.0;
    return QubitState::superposition(2, {{0b00, 1.0}, {0b11, sign}});
}

inline QubitState ghz(std::size_t n) {
    Bits all = (Bits{1} << n) - 1;
    return QubitState::superposition(n, {{0, 1.0}, {all, 1.0}});
}

}  // namespace states

/// Z-phase corrections mapping `state` onto `target` when the state lies on the
/// target's support (stray weight at most `tol`) and differs only by phases
/// that factor into single-qubit diagonal gates. False when none exist.
inline bool diagonal_phase_corrections(const QubitState &state, const QubitState &target, Corrections &out,
                                       double tol = 1e-9) {
    const std::size_t n = state.qubit_count;
    if (target.qubit_count != n) {
        throw std::invalid_argument("qubit count mismatch");
    }
    std::vector<Bits> support;
    double stray = 0;
    for (std::size_t i = 0; i < state.dim(); i++) {
        if (std::abs(target.amplitudes[i]) <= tol) {
            stray += std::norm(state.amplitudes[i]);
        } else if (std::abs(state.amplitudes[i]) <= tol) {
            return false;
        } else {
            support.push_back(i);
        }
    }
    if (support.empty() || stray > tol) {
        return false;
    }
    // Relative phase needed on each support element, referenced to the first.
    auto needed = [&](Bits b) {
        return std::arg(target.amplitudes[b] / state.amplitudes[b]);
    };
    const Bits ref = support.front();
    const double ref_phase = needed(ref);
    std::vector<double> angle(n, 0.0);
    std::vector<bool> fixed(n, false);
    // Greedy: each further support element pins the phase of one qubit where it differs from ref.
    for (std::size_t k = 1; k < support.size(); k++) {
        Bits b = support[k];
        double want = needed(b) - ref_phase;
        double have = 0;
        std::size_t free_q = n;
        for (std::size_t q = 0; q < n; q++) {
            if (bit_of(b, q, n) == bit_of(ref, q, n)) {
                continue;
            }
            double sign = bit_of(b, q, n) ? 1.0 : -1.0;
            if (fixed[q]) {
                have += sign * angle[q];
            } else if (free_q == n) {
                free_q = q;
            }
        }
        if (free_q < n) {
            double sign = bit_of(b, free_q, n) ? 1.0 : -1.0;
            angle[free_q] = sign * (want - have);
            fixed[free_q] = true;
        }
    }
    Corrections cs;
    for (std::size_t q = 0; q < n; q++) {
        double a = std::remainder(angle[q], 2 * std::numbers::pi);
        if (fixed[q] && std::abs(a) > 1e-15) {
            cs.push_back(LocalCorrection::phase(q, a));
        }
    }
    QubitState check = state.corrected(cs);
    if (check.fidelity(target) < 1 - 1e-9) {
        return false;
    }
    out = std::move(cs);
    return true;
}

}  // namespace qubus
