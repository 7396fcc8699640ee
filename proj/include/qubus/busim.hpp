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

// Exact simulation of a qubit register coupled to a single bosonic bus mode
// whose state stays a superposition of coherent states. Every branch carries a
// computational-basis pattern, a complex coefficient and a coherent amplitude.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qubus/qubit_state.hpp"

namespace qubus {

/// Dispersive-limit coupling constants. chi = g^2 / delta, theta = chi * t_int.
struct PhysicalParams {
    double g = 0;
    double delta = 0;
    double chi = 0;
    double t_int = 0;
    double theta = 0;

    static PhysicalParams from_coupling(double g, double delta, double t_int) {
        if (delta == 0) {
            throw std::invalid_argument("detuning must be nonzero");
        }
        PhysicalParams p;
        p.g = g;
        p.delta = delta;
        p.chi = g * g / delta;
        p.t_int = t_int;
        p.theta = p.chi * p.t_int;
        return p;
    }
};

struct Branch {
    Bits bits = 0;
    Complex coeff;
    Complex bus;
};

/// log <beta|gamma> for coherent states. The magnitude is formed from the
/// difference so large amplitudes never overflow or underflow prematurely.
inline Complex log_coherent_overlap(Complex beta, Complex gamma) {
    Complex d = beta - gamma;
    return {-0.5 * std::norm(d), std::imag(std::conj(beta) * gamma)};
}

inline Complex coherent_overlap(Complex beta, Complex gamma) { return std::exp(log_coherent_overlap(beta, gamma)); }

/// <n|beta> evaluated in log domain.
inline Complex fock_overlap(std::size_t n, Complex beta) {
    if (n == 0) {
        return std::exp(Complex(-0.5 * std::norm(beta), 0.0));
    }
    if (beta == Complex(0, 0)) {
        return 0.0;
    }
    double nn = static_cast<double>(n);
    Complex log_amp(-0.5 * std::norm(beta) + nn * std::log(std::abs(beta)) - 0.5 * std::lgamma(nn + 1.0),
                    nn * std::arg(beta));
    return std::exp(log_amp);
}

class HybridState {
   public:
    HybridState() = default;

    HybridState(std::size_t qubit_count, std::vector<Branch> branches) : qubit_count_(qubit_count) {
        if (qubit_count == 0 || qubit_count > kMaxQubits) {
            throw std::invalid_argument("invalid register size");
        }
        for (const auto &b : branches) {
            if (b.bits >> qubit_count) {
                throw std::invalid_argument("branch bit pattern exceeds register size");
            }
        }
        branches_ = merge(std::move(branches));
    }

    /// Register state `qubits` tensored with the coherent bus |alpha>.
    static HybridState from_qubits(const QubitState &qubits, Complex alpha) {
        std::vector<Branch> bs;
        for (std::size_t i = 0; i < qubits.dim(); i++) {
            if (qubits.amplitudes[i] != Complex(0, 0)) {
                bs.push_back({static_cast<Bits>(i), qubits.amplitudes[i], alpha});
            }
        }
        return {qubits.qubit_count, std::move(bs)};
    }

    std::size_t qubit_count() const { return qubit_count_; }
    const std::vector<Branch> &branches() const { return branches_; }

    /// Norm including coherent-state overlaps between branches sharing a pattern.
    double norm() const {
        double total = 0;
        for (std::size_t i = 0; i < branches_.size(); i++) {
            for (std::size_t j = i; j < branches_.size() && branches_[j].bits == branches_[i].bits; j++) {
                const auto &bi = branches_[i];
                const auto &bj = branches_[j];
                Complex term = bi.coeff * std::conj(bj.coeff) * coherent_overlap(bj.bus, bi.bus);
                total += (i == j) ? term.real() : 2 * term.real();
            }
        }
        return std::sqrt(std::max(total, 0.0));
    }

    /// Applies `f(branch)` to every branch, then re-merges.
    template <typename F>
    HybridState transformed(F &&f) const {
        std::vector<Branch> out = branches_;
        for (auto &b : out) {
            f(b);
        }
        HybridState s;
        s.qubit_count_ = qubit_count_;
        s.branches_ = merge(std::move(out));
        return s;
    }

    void check_qubit(std::size_t q) const {
        if (q >= qubit_count_) {
            throw std::out_of_range("qubit index out of range");
        }
    }

   private:
    static bool same_bus(Complex a, Complex b) {
        return std::abs(a - b) <= 1e-12 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
    }

    static std::vector<Branch> merge(std::vector<Branch> bs) {
        std::stable_sort(bs.begin(), bs.end(), [](const Branch &a, const Branch &b) { return a.bits < b.bits; });
        std::vector<Branch> out;
        out.reserve(bs.size());
        std::size_t group_start = 0;
        for (auto &b : bs) {
            if (out.size() > group_start && out[group_start].bits != b.bits) {
                group_start = out.size();
            }
            bool merged = false;
            for (std::size_t k = group_start; k < out.size(); k++) {
                if (same_bus(out[k].bus, b.bus)) {
                    out[k].coeff += b.coeff;
                    merged = true;
                    break;
                }
            }
            if (!merged) {
                out.push_back(b);
            }
        }
        std::erase_if(out, [](const Branch &b) { return b.coeff == Complex(0, 0); });
        return out;
    }

    std::size_t qubit_count_ = 0;
    std::vector<Branch> branches_;
};

inline HybridState init_plus_state(std::size_t n, Complex alpha) {
    if (n == 0 || n > kMaxQubits) {
        throw std::invalid_argument("invalid register size");
    }
    return HybridState::from_qubits(QubitState::plus(n), alpha);
}

/// R(theta sigma_z^q): bus rotated by +theta when qubit q is |0>, -theta when |1>.
inline HybridState apply_conditional_rotation(const HybridState &state, std::size_t q, double theta) {
    state.check_qubit(q);
    const std::size_t n = state.qubit_count();
    return state.transformed([&](Branch &b) { b.bus *= std::polar(1.0, z_sign(b.bits, q, n) * theta); });
}

namespace detail {

/// D(delta)|gamma> = exp(i Im(delta conj(gamma))) |gamma + delta>.
inline void displace_branch(Branch &b, Complex delta) {
    b.coeff *= std::polar(1.0, std::imag(delta * std::conj(b.bus)));
    b.bus += delta;
}

}  // namespace detail

/// D(beta sigma_z^q).
inline HybridState apply_conditional_displacement(const HybridState &state, std::size_t q, Complex beta) {
    state.check_qubit(q);
    const std::size_t n = state.qubit_count();
    return state.transformed(
        [&](Branch &b) { detail::displace_branch(b, static_cast<double>(z_sign(b.bits, q, n)) * beta); });
}

/// Unconditional D(beta).
inline HybridState apply_displacement(const HybridState &state, Complex beta) {
    return state.transformed([&](Branch &b) { detail::displace_branch(b, beta); });
}

/// Largest pairwise distance between branch bus amplitudes.
inline double bus_spread(const HybridState &state) {
    const auto &bs = state.branches();
    double spread = 0;
    for (std::size_t i = 0; i < bs.size(); i++) {
        for (std::size_t j = i + 1; j < bs.size(); j++) {
            spread = std::max(spread, std::abs(bs[i].bus - bs[j].bus));
        }
    }
    return spread;
}

/// Factors out a common bus amplitude. Throws if the bus is still entangled.
inline QubitState extract_qubits(const HybridState &state, double tol = 1e-9) {
    double spread = bus_spread(state);
    if (!(spread < tol)) {
        throw std::domain_error("bus still entangled with register (spread " + std::to_string(spread) + ")");
    }
    std::vector<Complex> amps(std::size_t{1} << state.qubit_count());
    for (const auto &b : state.branches()) {
        amps[b.bits] += b.coeff;
    }
    QubitState out(state.qubit_count(), std::move(amps));
    out.normalize();
    return out;
}

// ---------------------------------------------------------------------------
// Homodyne detection of X(phi) = a^dag e^{i phi} + a e^{-i phi}; unit variance
// per coherent branch, mean 2 Re(beta e^{-i phi}).

inline double quadrature_center(Complex bus, double phi) { return 2.0 * std::real(bus * std::polar(1.0, -phi)); }

/// <x_phi|beta> = (2 pi)^{-1/4} exp(-(x - 2Re b)^2/4 + i Im(b) x - i Im(b) Re(b)), b = beta e^{-i phi}.
inline Complex quadrature_overlap(Complex beta, double phi, double x) {
    Complex b = beta * std::polar(1.0, -phi);
    double d = x - 2.0 * b.real();
    double log_mag = -0.25 * d * d - 0.25 * std::log(2.0 * std::numbers::pi);
    double ph = b.imag() * x - b.imag() * b.real();
    return std::polar(std::exp(log_mag), ph);
}

inline double gaussian_pdf(double x, double mean) {
    double d = x - mean;
    return std::exp(-0.5 * d * d) / std::sqrt(2.0 * std::numbers::pi);
}

/// P(N(mean, 1) in [lo, hi]).
inline double gaussian_mass(double mean, double lo, double hi) {
    auto upper_tail = [&](double x) {
        if (x == std::numeric_limits<double>::infinity()) {
            return 0.0;
        }
        if (x == -std::numeric_limits<double>::infinity()) {
            return 1.0;
        }
        return 0.5 * std::erfc((x - mean) / std::numbers::sqrt2);
    };
    return upper_tail(lo) - upper_tail(hi);
}

struct Peak {
    double center = 0;
    double weight = 0;
    std::vector<Bits> members;
};

struct PeakModel {
    double phi = 0;
    std::vector<Peak> peaks;  // sorted by descending center

    /// Decision window of peak k: bounded by midpoints to its neighbours.
    std::pair<double, double> window(std::size_t k) const {
        const double inf = std::numeric_limits<double>::infinity();
        double hi = (k == 0) ? inf : 0.5 * (peaks[k - 1].center + peaks[k].center);
        double lo = (k + 1 == peaks.size()) ? -inf : 0.5 * (peaks[k].center + peaks[k + 1].center);
        return {lo, hi};
    }

    /// Probability an outcome lands in window k, including tails of every peak.
    double window_probability(std::size_t k) const {
        auto [lo, hi] = window(k);
        double total = 0;
        for (const auto &p : peaks) {
            total += p.weight * gaussian_mass(p.center, lo, hi);
        }
        return total;
    }

    /// Probability that an outcome is assigned to a different peak than the one it came from.
    double misassignment_probability() const {
        double total = 0;
        for (std::size_t k = 0; k < peaks.size(); k++) {
            auto [lo, hi] = window(k);
            total += peaks[k].weight * (1.0 - gaussian_mass(peaks[k].center, lo, hi));
        }
        return total;
    }

    double density(double x) const {
        double total = 0;
        for (const auto &p : peaks) {
            total += p.weight * gaussian_pdf(x, p.center);
        }
        return total;
    }

    std::size_t peak_containing(Bits bits) const {
        for (std::size_t k = 0; k < peaks.size(); k++) {
            if (std::find(peaks[k].members.begin(), peaks[k].members.end(), bits) != peaks[k].members.end()) {
                return k;
            }
        }
        throw std::out_of_range("pattern not present in any peak");
    }
};

inline void require_normalized(const HybridState &state) {
    if (std::abs(state.norm() - 1.0) > 1e-9) {
        throw std::domain_error("state is not normalized");
    }
}

namespace detail {

/// Squared norm of the restriction of `state` to branches with index in `idx`.
inline double restricted_norm2(const std::vector<Branch> &bs, const std::vector<std::size_t> &idx) {
    double total = 0;
    for (std::size_t a = 0; a < idx.size(); a++) {
        for (std::size_t b = a; b < idx.size(); b++) {
            const auto &bi = bs[idx[a]];
            const auto &bj = bs[idx[b]];
            if (bi.bits != bj.bits) {
                continue;
            }
            Complex term = bi.coeff * std::conj(bj.coeff) * coherent_overlap(bj.bus, bi.bus);
            total += (a == b) ? term.real() : 2 * term.real();
        }
    }
    return total;
}

}  // namespace detail

inline PeakModel homodyne_pdf(const HybridState &state, double phi, double group_tol = 1e-9) {
    require_normalized(state);
    const auto &bs = state.branches();
    std::vector<std::size_t> order(bs.size());
    for (std::size_t i = 0; i < order.size(); i++) {
        order[i] = i;
    }
    std::vector<double> centers(bs.size());
    for (std::size_t i = 0; i < bs.size(); i++) {
        centers[i] = quadrature_center(bs[i].bus, phi);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return centers[a] > centers[b]; });

    PeakModel model;
    model.phi = phi;
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t i : order) {
        if (!groups.empty() && std::abs(centers[groups.back().front()] - centers[i]) <= group_tol) {
            groups.back().push_back(i);
        } else {
            groups.push_back({i});
        }
    }
    for (const auto &g : groups) {
        Peak p;
        double sum = 0;
        for (std::size_t i : g) {
            sum += centers[i];
            if (std::find(p.members.begin(), p.members.end(), bs[i].bits) == p.members.end()) {
                p.members.push_back(bs[i].bits);
            }
        }
        std::sort(p.members.begin(), p.members.end());
        p.center = sum / static_cast<double>(g.size());
        p.weight = detail::restricted_norm2(bs, g);
        model.peaks.push_back(std::move(p));
    }
    return model;
}

/// Register state left behind when the quadrature reads exactly `x`.
struct HomodyneOutcome {
    double probability = 0;         // exact peak weight, or density when a real x is forced
    double window_probability = 0;  // mass inside the decision window, tails included
    double x = 0;
    QubitState posterior;
};

/// Projects onto |x_phi>, keeping only branches whose patterns are in `members`
/// (all branches when `members` is empty).
inline QubitState project_quadrature(const HybridState &state, double phi, double x,
                                     const std::vector<Bits> &members = {}) {
    std::vector<Complex> amps(std::size_t{1} << state.qubit_count());
    for (const auto &b : state.branches()) {
        if (!members.empty() && std::find(members.begin(), members.end(), b.bits) == members.end()) {
            continue;
        }
        amps[b.bits] += b.coeff * quadrature_overlap(b.bus, phi, x);
    }
    QubitState out(state.qubit_count(), std::move(amps));
    out.normalize();
    return out;
}

/// Ideal peak-resolved homodyne: the posterior is the selected peak's branches
/// evaluated at the peak center.
inline HomodyneOutcome homodyne_project_peak(const HybridState &state, double phi, std::size_t peak_index) {
    PeakModel model = homodyne_pdf(state, phi);
    if (peak_index >= model.peaks.size() || !(model.peaks[peak_index].weight > 0)) {
        throw std::out_of_range("empty peak selection");
    }
    const Peak &peak = model.peaks[peak_index];
    HomodyneOutcome out;
    out.probability = peak.weight;
    out.window_probability = model.window_probability(peak_index);
    out.x = peak.center;
    out.posterior = project_quadrature(state, phi, peak.center, peak.members);
    return out;
}

/// Forced real quadrature outcome.
inline HomodyneOutcome homodyne_project_value(const HybridState &state, double phi, double x) {
    require_normalized(state);
    std::vector<Complex> amps(std::size_t{1} << state.qubit_count());
    for (const auto &b : state.branches()) {
        amps[b.bits] += b.coeff * quadrature_overlap(b.bus, phi, x);
    }
    double density = 0;
    for (const auto &a : amps) {
        density += std::norm(a);
    }
    if (!(density > 0)) {
        throw std::domain_error("outcome has zero density");
    }
    HomodyneOutcome out;
    out.probability = density;
    out.x = x;
    PeakModel model = homodyne_pdf(state, phi);
    for (std::size_t k = 0; k < model.peaks.size(); k++) {
        auto [lo, hi] = model.window(k);
        if (x >= lo && x < hi) {
            out.window_probability = model.window_probability(k);
        }
    }
    out.posterior = QubitState(state.qubit_count(), std::move(amps));
    out.posterior.normalize();
    return out;
}

// ---------------------------------------------------------------------------
// Photon counting on the bus.

struct BucketOutcome {
    std::size_t photons = 0;
    double probability = 0;
    QubitState posterior;
};

/// Projects the bus onto |n>.
inline BucketOutcome measure_photons(const HybridState &state, std::size_t n) {
    std::vector<Complex> amps(std::size_t{1} << state.qubit_count());
    for (const auto &b : state.branches()) {
        amps[b.bits] += b.coeff * fock_overlap(n, b.bus);
    }
    BucketOutcome out;
    out.photons = n;
    for (const auto &a : amps) {
        out.probability += std::norm(a);
    }
    if (out.probability > 0) {
        out.posterior = QubitState(state.qubit_count(), std::move(amps));
        out.posterior.normalize();
    }
    return out;
}

/// Photon-number range [lo, hi] outside which every branch's Poisson tail is negligible.
inline std::pair<std::size_t, std::size_t> photon_window(const HybridState &state) {
    double max_mean = 0;
    double min_mean = std::numeric_limits<double>::infinity();
    for (const auto &b : state.branches()) {
        max_mean = std::max(max_mean, std::norm(b.bus));
        min_mean = std::min(min_mean, std::norm(b.bus));
    }
    double lo = std::max(0.0, min_mean - 14.0 * std::sqrt(min_mean) - 40.0);
    double hi = max_mean + 14.0 * std::sqrt(max_mean) + 40.0;
    return {static_cast<std::size_t>(lo), static_cast<std::size_t>(std::ceil(hi))};
}

/// Non-number-resolving detection: vacuum, or a click whose posterior is a
/// mixture over photon numbers.
struct BucketMeasurement {
    BucketOutcome vacuum;
    double click_probability = 0;
    std::vector<BucketOutcome> click_components;  // n >= 1, each with its own probability
};

inline BucketMeasurement measure_bucket(const HybridState &state, double drop_below = 1e-300) {
    require_normalized(state);
    BucketMeasurement m;
    m.vacuum = measure_photons(state, 0);
    auto [lo, hi] = photon_window(state);
    for (std::size_t n = std::max<std::size_t>(lo, 1); n <= hi; n++) {
        BucketOutcome o = measure_photons(state, n);
        if (o.probability > drop_below) {
            m.click_probability += o.probability;
            m.click_components.push_back(std::move(o));
        }
    }
    return m;
}

}  // namespace qubus
