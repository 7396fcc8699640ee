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

// Truncated Fock-space reference for register + bus evolution. Amplitudes are
// indexed by (bits, photon number); displacements use exact matrix elements
// from associated Laguerre polynomials.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qubus/busim.hpp"

namespace qubus::oracle {

/// <m|D(alpha)|n>.
inline Complex displacement_element(std::size_t m, std::size_t n, Complex alpha) {
    const double x = std::norm(alpha);
    const double pre = std::exp(-0.5 * x);
    if (m >= n) {
        const auto k = static_cast<unsigned>(m - n);
        double ratio = std::exp(0.5 * (std::lgamma(n + 1.0) - std::lgamma(m + 1.0)));
        return ratio * std::pow(alpha, static_cast<double>(k)) * pre *
               std::assoc_laguerre(static_cast<unsigned>(n), k, x);
    }
    const auto k = static_cast<unsigned>(n - m);
    double ratio = std::exp(0.5 * (std::lgamma(m + 1.0) - std::lgamma(n + 1.0)));
    return ratio * std::pow(-std::conj(alpha), static_cast<double>(k)) * pre *
           std::assoc_laguerre(static_cast<unsigned>(m), k, x);
}

class FockState {
   public:
    FockState(std::size_t qubits, std::size_t dim) : n_(qubits), d_(dim), amps_((std::size_t{1} << qubits) * dim) {}

    static FockState from_hybrid(const HybridState &h, std::size_t dim) {
        FockState f(h.qubit_count(), dim);
        for (const auto &b : h.branches()) {
            for (std::size_t k = 0; k < dim; k++) {
                f.at(b.bits, k) += b.coeff * fock_overlap(k, b.bus);
            }
        }
        return f;
    }

    Complex &at(Bits bits, std::size_t k) { return amps_[bits * d_ + k]; }
    Complex at(Bits bits, std::size_t k) const { return amps_[bits * d_ + k]; }

    void rotate(std::size_t q, double theta) {
        for (Bits b = 0; b < (Bits{1} << n_); b++) {
            double s = z_sign(b, q, n_);
            for (std::size_t k = 0; k < d_; k++) {
                at(b, k) *= std::polar(1.0, s * theta * static_cast<double>(k));
            }
        }
    }

    void displace(std::optional<std::size_t> q, Complex beta) {
        std::vector<Complex> plus = matrix(beta);
        std::vector<Complex> minus = q ? matrix(-beta) : plus;
        for (Bits b = 0; b < (Bits{1} << n_); b++) {
            const auto &m = (!q || z_sign(b, *q, n_) > 0) ? plus : minus;
            std::vector<Complex> out(d_);
            for (std::size_t i = 0; i < d_; i++) {
                for (std::size_t j = 0; j < d_; j++) {
                    out[i] += m[i * d_ + j] * at(b, j);
                }
            }
            for (std::size_t i = 0; i < d_; i++) {
                at(b, i) = out[i];
            }
        }
    }

    /// |<this|other>|^2 / (|this|^2 |other|^2).
    double fidelity(const FockState &o) const {
        Complex ip = 0;
        double na = 0, nb = 0;
        for (std::size_t i = 0; i < amps_.size(); i++) {
            ip += std::conj(amps_[i]) * o.amps_[i];
            na += std::norm(amps_[i]);
            nb += std::norm(o.amps_[i]);
        }
        return std::norm(ip) / (na * nb);
    }

   private:
    std::vector<Complex> matrix(Complex beta) const {
        std::vector<Complex> m(d_ * d_);
        for (std::size_t i = 0; i < d_; i++) {
            for (std::size_t j = 0; j < d_; j++) {
                m[i * d_ + j] = displacement_element(i, j, beta);
            }
        }
        return m;
    }

    std::size_t n_, d_;
    std::vector<Complex> amps_;
};

}  // namespace qubus::oracle
