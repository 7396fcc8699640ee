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

// Dense state-vector reference for small registers. Deliberately naive:
// every gate and projector is applied amplitude by amplitude.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "qubus/graphstab.hpp"
#include "qubus/qubit_state.hpp"

namespace qubus::oracle {

class DenseState {
   public:
    explicit DenseState(std::size_t n) : n_(n), amps_(std::size_t{1} << n) { amps_[0] = 1; }
    explicit DenseState(const QubitState &s) : n_(s.qubit_count), amps_(s.amplitudes) {}

    static DenseState graph(const GraphSpec &g) {
        DenseState s(g.vertex_count);
        for (std::size_t q = 0; q < g.vertex_count; q++) {
            s.h(q);
        }
        for (auto [a, b] : g.edges) {
            s.cz(a, b);
        }
        return s;
    }

    std::size_t qubit_count() const { return n_; }
    const std::vector<Complex> &amplitudes() const { return amps_; }
    QubitState state() const { return {n_, amps_}; }

    void h(std::size_t q) {
        const double r = 1 / std::sqrt(2.0);
        for_pairs(q, [&](Complex &a0, Complex &a1) {
            Complex x = a0, y = a1;
            a0 = r * (x + y);
            a1 = r * (x - y);
        });
    }
    void x(std::size_t q) {
        for_pairs(q, [](Complex &a0, Complex &a1) { std::swap(a0, a1); });
    }
    void z(std::size_t q) {
        for_pairs(q, [](Complex &, Complex &a1) { a1 = -a1; });
    }
    void s(std::size_t q) {
        for_pairs(q, [](Complex &, Complex &a1) { a1 *= Complex(0, 1); });
    }
    void cz(std::size_t a, std::size_t b) {
        for (std::size_t i = 0; i < amps_.size(); i++) {
            if (bit_of(i, a, n_) && bit_of(i, b, n_)) {
                amps_[i] = -amps_[i];
            }
        }
    }

    /// Expectation-free projection onto the `outcome` eigenspace of a Pauli.
    /// Returns the outcome probability; the state is renormalized when it is positive.
    double project(const PauliString &p, int outcome) {
        std::vector<Complex> applied = apply_pauli(p);
        double prob = 0;
        std::vector<Complex> out(amps_.size());
        for (std::size_t i = 0; i < amps_.size(); i++) {
            out[i] = 0.5 * (amps_[i] + static_cast<double>(outcome) * applied[i]);
            prob += std::norm(out[i]);
        }
        if (prob > 1e-15) {
            double nrm = std::sqrt(prob);
            for (auto &a : out) {
                a /= nrm;
            }
            amps_ = std::move(out);
        }
        return prob;
    }

    /// Removes qubit q, which must be in a computational basis state.
    int remove_basis_qubit(std::size_t q) {
        double w[2] = {0, 0};
        for (std::size_t i = 0; i < amps_.size(); i++) {
            w[bit_of(i, q, n_) ? 1 : 0] += std::norm(amps_[i]);
        }
        int value = w[1] > w[0] ? 1 : 0;
        if (w[1 - value] > 1e-12) {
            throw std::domain_error("qubit is not in a basis state");
        }
        std::vector<Complex> out(amps_.size() / 2);
        for (std::size_t i = 0; i < amps_.size(); i++) {
            if ((bit_of(i, q, n_) ? 1 : 0) != value) {
                continue;
            }
            std::size_t hi = i >> (n_ - q);
            std::size_t lo = i & ((std::size_t{1} << (n_ - 1 - q)) - 1);
            out[(hi << (n_ - 1 - q)) | lo] = amps_[i];
        }
        n_ -= 1;
        amps_ = std::move(out);
        return value;
    }

   private:
    template <typename F>
    void for_pairs(std::size_t q, F &&f) {
        for (std::size_t i = 0; i < amps_.size(); i++) {
            if (!bit_of(i, q, n_)) {
                f(amps_[i], amps_[flip_bit(i, q, n_)]);
            }
        }
    }

    std::vector<Complex> apply_pauli(const PauliString &p) const {
        if (p.size() != n_) {
            throw std::invalid_argument("Pauli length mismatch");
        }
        std::vector<Complex> out(amps_.size());
        const Complex ipow[4] = {1.0, Complex(0, 1), -1.0, Complex(0, -1)};
        for (std::size_t i = 0; i < amps_.size(); i++) {
            std::size_t j = i;
            Complex c = ipow[p.phase & 3];
            for (std::size_t q = 0; q < n_; q++) {
                bool b = bit_of(i, q, n_);
                if (p.zs[q] && b) {
                    c = -c;
                }
                if (p.xs[q]) {
                    j = flip_bit(j, q, n_);
                    if (p.zs[q]) {
                        c *= Complex(0, 1);  // Y = i X Z
                    }
                }
            }
            out[j] += c * amps_[i];
        }
        return out;
    }

    std::size_t n_;
    std::vector<Complex> amps_;
};

/// State stabilized by `tab`, from the projector product applied to a basis state.
inline QubitState tableau_to_state(const StabilizerTableau &tab) {
    const std::size_t n = tab.qubit_count();
    if (n == 0) {
        throw std::invalid_argument("empty register has no state vector");
    }
    for (std::size_t start = 0; start < (std::size_t{1} << n); start++) {
        DenseState s(QubitState::basis(n, start));
        bool ok = true;
        for (const auto &g : tab.generators()) {
            if (s.project(g, +1) < 1e-12) {
                ok = false;
                break;
            }
        }
        if (ok) {
            return s.state();
        }
    }
    throw std::logic_error("no basis state overlaps the stabilizer space");
}

}  // namespace qubus::oracle
