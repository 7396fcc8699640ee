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

// Entangling gates mediated by a coherent bus: homodyne and photon-counting
// parity gates, the three-qubit and cascaded gates, and measurement-free
// geometric-phase sequences.

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qubus/busim.hpp"
#include "qubus/graphstab.hpp"
#include "qubus/qubit_state.hpp"
#include "qubus/rng.hpp"

namespace qubus {

struct GateOutcome {
    std::string label;
    double probability = 0;         // exact, from branch enumeration
    double window_probability = 0;  // mass inside the decision window, tails included
    QubitState posterior;
    std::optional<QubitState> target;  // canonical state the corrections aim for
    Corrections corrections;
    double fidelity = 0;  // posterior after corrections vs target; 0 without target
    bool entangling = false;
    std::vector<std::pair<double, QubitState>> mixture;  // heralded mixtures only
};

struct GateErrorBudget {
    double p_err_momentum = 0;
    double p_err_position = 0;
    double p_err_vacuum = 0;
    double p_err_vacuum_exact = 0;  // exp(-4 alpha^2 sin^2 theta)
    double separation_parameter = 0;  // alpha * theta
    bool regime_ok = false;           // alpha sin(theta) >= pi
    std::vector<std::string> warnings;
};

struct GateTable {
    std::string gate;
    std::vector<GateOutcome> outcomes;
    GateErrorBudget budget;
    double peak_leakage = 0;  // simulated misassignment over the whole peak model
    double gate_time = 0;     // sum of |k| over conditional rotations of angle k theta
    std::vector<std::string> warnings;

    double total_probability() const {
        double t = 0;
        for (const auto &o : outcomes) {
            t += o.probability;
        }
        return t;
    }

    double success_probability() const {
        double t = 0;
        for (const auto &o : outcomes) {
            if (o.entangling) {
                t += o.probability;
            }
        }
        return t;
    }

    const GateOutcome &find(const std::string &label) const {
        for (const auto &o : outcomes) {
            if (o.label == label) {
                return o;
            }
        }
        throw std::invalid_argument("no outcome labelled " + label);
    }
};

/// Forced label, or sampling from `rng`.
struct OutcomeChoice {
    std::optional<std::string> label;
    Rng *rng = nullptr;
};

inline GateOutcome select_outcome(const GateTable &table, const OutcomeChoice &choice) {
    if (choice.label) {
        return table.find(*choice.label);
    }
    if (choice.rng == nullptr) {
        throw std::invalid_argument("outcome must be forced or sampled with an Rng");
    }
    double u = choice.rng->uniform() * table.total_probability();
    double acc = 0;
    for (const auto &o : table.outcomes) {
        acc += o.probability;
        if (u < acc) {
            return o;
        }
    }
    return table.outcomes.back();
}

/// 1/2 erfc(x / sqrt 2): upper tail of a unit normal at x.
inline double normal_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

inline GateErrorBudget error_budget(double alpha, double theta) {
    if (!(alpha > 0)) {
        throw std::invalid_argument("alpha must be positive");
    }
    GateErrorBudget b;
    b.p_err_momentum = normal_tail(std::abs(alpha * std::sin(theta)));
    b.p_err_position = normal_tail(std::abs(alpha * (1 - std::cos(theta))));
    b.p_err_vacuum = std::exp(-4 * alpha * alpha * theta * theta);
    double st = std::sin(theta);
    b.p_err_vacuum_exact = std::exp(-4 * alpha * alpha * st * st);
    b.separation_parameter = alpha * theta;
    b.regime_ok = std::abs(alpha * st) >= std::numbers::pi;
    if (b.p_err_momentum > 0.1) {
        b.warnings.push_back("peaks overlap: momentum error " + std::to_string(b.p_err_momentum) + " exceeds 0.1");
    }
    return b;
}

namespace detail {

/// Exact outcome for a set of member patterns of a pure input (before corrections).
inline void finish_outcome(GateOutcome &o) {
    if (!o.target) {
        return;
    }
    Corrections cs;
    if (diagonal_phase_corrections(o.posterior, *o.target, cs)) {
        o.corrections = std::move(cs);
    }
    o.fidelity = o.posterior.corrected(o.corrections).fidelity(*o.target);
}

/// Uniform superposition over the given patterns.
inline QubitState uniform_over(std::size_t n, const std::vector<Bits> &members) {
    std::vector<std::pair<Bits, Complex>> terms;
    for (Bits b : members) {
        terms.emplace_back(b, 1.0);
    }
    return QubitState::superposition(n, terms);
}

struct Classifier {
    std::function<std::string(Bits)> label;
    std::function<std::optional<QubitState>(const std::string &, const std::vector<Bits> &)> target;
    std::function<bool(const std::string &, const std::vector<Bits> &)> entangling;
};

/// Homodyne outcome table: one row per physical peak. A peak whose members
/// fall into different classes is reported as "unresolved".
inline std::vector<GateOutcome> homodyne_table(const HybridState &state, double phi, const Classifier &cls,
                                               double &leakage) {
    PeakModel model = homodyne_pdf(state, phi);
    leakage = model.misassignment_probability();
    std::vector<GateOutcome> out;
    std::map<std::string, int> seen;
    for (std::size_t k = 0; k < model.peaks.size(); k++) {
        const Peak &peak = model.peaks[k];
        if (!(peak.weight > 0)) {
            continue;
        }
        std::string label = cls.label(peak.members.front());
        for (Bits b : peak.members) {
            if (cls.label(b) != label) {
                label = "unresolved";
                break;
            }
        }
        if (seen[label]++ > 0) {
            label += "#" + std::to_string(seen[label] - 1);
        }
        auto h = homodyne_project_peak(state, phi, k);
        GateOutcome o;
        o.label = label;
        o.probability = h.probability;
        o.window_probability = h.window_probability;
        o.posterior = h.posterior;
        if (label != "unresolved") {
            o.target = cls.target(label, peak.members);
            o.entangling = cls.entangling(label, peak.members);
        }
        finish_outcome(o);
        out.push_back(std::move(o));
    }
    return out;
}

inline void require_size(const QubitState &input, std::size_t n) {
    if (input.qubit_count != n) {
        throw std::invalid_argument("register must have " + std::to_string(n) + " qubits");
    }
}

/// True when the patterns disagree on qubits 0 and 1 jointly, i.e. the pair
/// is left in a superposition of distinct two-qubit values.
inline bool pair_varies(const std::vector<Bits> &members, std::size_t n) {
    auto pair = [&](Bits b) { return (bit_of(b, 0, n) ? 2 : 0) + (bit_of(b, 1, n) ? 1 : 0); };
    for (Bits b : members) {
        if (pair(b) != pair(members.front())) {
            return true;
        }
    }
    return false;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Two-qubit parity gates. Each qubit rotates the bus by theta, so the total
// relative rotation between even branches is 2 theta.

inline HybridState parity_gate_state(double alpha, double theta, const QubitState &input) {
    detail::require_size(input, 2);
    HybridState s = HybridState::from_qubits(input, alpha);
    s = apply_conditional_rotation(s, 0, theta);
    return apply_conditional_rotation(s, 1, theta);
}

/// Momentum-quadrature (phi = pi/2) homodyne parity gate.
inline GateTable parity_momentum_table(double alpha, double theta, const QubitState &input) {
    GateTable t;
    t.gate = "parity-momentum";
    t.budget = error_budget(alpha, theta);
    t.warnings = t.budget.warnings;
    t.gate_time = 2;
    HybridState s = parity_gate_state(alpha, theta, input);
    detail::Classifier cls;
    cls.label = [](Bits b) {
        switch (b) {
            case 0b00:
                return std::string("product-00");
            case 0b11:
                return std::string("product-11");
            default:
                return std::string("odd-bell");
        }
    };
    cls.target = [](const std::string &label, const std::vector<Bits> &members) -> std::optional<QubitState> {
        if (label == "odd-bell" && members.size() == 2) {
            return states::odd_bell();
        }
        if (members.size() == 1) {
            return QubitState::basis(2, members.front());
        }
        return std::nullopt;
    };
    cls.entangling = [](const std::string &, const std::vector<Bits> &m) { return m.size() == 2; };
    t.outcomes = detail::homodyne_table(s, std::numbers::pi / 2, cls, t.peak_leakage);
    return t;
}

inline GateOutcome parity_gate_momentum(double alpha, double theta, const QubitState &input,
                                        const OutcomeChoice &choice) {
    return select_outcome(parity_momentum_table(alpha, theta, input), choice);
}

/// Position-quadrature (phi = 0) homodyne parity gate: even and odd peaks.
inline GateTable parity_position_table(double alpha, double theta, const QubitState &input) {
    GateTable t;
    t.gate = "parity-position";
    t.budget = error_budget(alpha, theta);
    if (t.budget.p_err_position > 0.1) {
        t.warnings.push_back("peaks overlap: position error " + std::to_string(t.budget.p_err_position) +
                             " exceeds 0.1");
    }
    t.gate_time = 2;
    HybridState s = parity_gate_state(alpha, theta, input);
    detail::Classifier cls;
    cls.label = [](Bits b) { return (b == 0b00 || b == 0b11) ? std::string("even-bell") : std::string("odd-bell"); };
    cls.target = [](const std::string &label, const std::vector<Bits> &members) -> std::optional<QubitState> {
        if (members.size() == 2) {
            return label == "even-bell" ? states::even_bell(0) : states::odd_bell();
        }
        return QubitState::basis(2, members.front());
    };
    cls.entangling = [](const std::string &, const std::vector<Bits> &m) { return m.size() == 2; };
    t.outcomes = detail::homodyne_table(s, 0.0, cls, t.peak_leakage);
    return t;
}

inline GateOutcome parity_gate_position(double alpha, double theta, const QubitState &input,
                                        const OutcomeChoice &choice) {
    return select_outcome(parity_position_table(alpha, theta, input), choice);
}

/// Photon-counting parity gate: D(-alpha) after the rotations, then vacuum
/// versus click. With number resolution each photon count is its own row.
inline GateTable parity_bucket_table(double alpha, double theta, const QubitState &input, bool number_resolving) {
    GateTable t;
    t.gate = number_resolving ? "parity-bucket-resolving" : "parity-bucket";
    t.budget = error_budget(alpha, theta);
    t.gate_time = 2;
    HybridState s = apply_displacement(parity_gate_state(alpha, theta, input), -alpha);
    BucketMeasurement m = measure_bucket(s);
    const double st = std::sin(theta);
    if (m.vacuum.probability > 0) {
        GateOutcome o;
        o.label = "odd-bell";
        o.probability = m.vacuum.probability;
        o.window_probability = o.probability;
        o.posterior = m.vacuum.posterior;
        o.target = states::odd_bell();
        o.entangling = true;
        detail::finish_outcome(o);
        t.outcomes.push_back(std::move(o));
    }
    if (number_resolving) {
        for (auto &c : m.click_components) {
            GateOutcome o;
            o.label = "even-bell-" + std::to_string(c.photons);
            o.probability = c.probability;
            o.window_probability = o.probability;
            o.posterior = c.posterior;
            o.target = states::even_bell(static_cast<int>(c.photons % 2));
            o.entangling = true;
            detail::finish_outcome(o);
            t.outcomes.push_back(std::move(o));
        }
    } else if (m.click_probability > 0) {
        GateOutcome o;
        o.label = "click";
        o.probability = m.click_probability;
        o.window_probability = o.probability;
        for (auto &c : m.click_components) {
            o.mixture.emplace_back(c.probability / m.click_probability, c.posterior);
        }
        o.posterior = o.mixture.front().second;
        t.outcomes.push_back(std::move(o));
    }
    t.peak_leakage = std::exp(-4 * alpha * alpha * st * st) * 0.5;
    return t;
}

inline GateOutcome parity_gate_bucket(double alpha, double theta, const QubitState &input, bool number_resolving,
                                      const OutcomeChoice &choice) {
    return select_outcome(parity_bucket_table(alpha, theta, input, number_resolving), choice);
}

// ---------------------------------------------------------------------------
// Multi-qubit gates. Qubit q rotates the bus by schedule[q] * theta; the peak
// index of a pattern is k = sum_q schedule[q] * s_q.

inline std::vector<int> cascade_schedule(std::size_t n) {
    if (n < 2) {
        throw std::invalid_argument("cascaded gate needs at least 2 qubits");
    }
    std::vector<int> sched{1};
    for (std::size_t q = 1; q + 1 < n; q++) {
        sched.push_back(q == 1 ? 1 : (1 << (q - 1)));
    }
    sched.push_back(-(1 << (n - 2)));
    return sched;
}

inline int peak_index(Bits bits, const std::vector<int> &schedule) {
    const std::size_t n = schedule.size();
    int k = 0;
    for (std::size_t q = 0; q < n; q++) {
        k += schedule[q] * z_sign(bits, q, n);
    }
    return k;
}

inline HybridState scheduled_state(double alpha, double theta, const QubitState &input,
                                   const std::vector<int> &schedule) {
    detail::require_size(input, schedule.size());
    HybridState s = HybridState::from_qubits(input, alpha);
    for (std::size_t q = 0; q < schedule.size(); q++) {
        s = apply_conditional_rotation(s, q, schedule[q] * theta);
    }
    return s;
}

inline double schedule_time(const std::vector<int> &schedule) {
    double t = 0;
    for (int k : schedule) {
        t += std::abs(k);
    }
    return t;
}

inline GateTable three_qubit_table(double alpha, double theta, const QubitState &input) {
    const std::vector<int> sched{1, 1, -2};
    GateTable t;
    t.gate = "three-qubit";
    t.budget = error_budget(alpha, theta);
    t.warnings = t.budget.warnings;
    t.gate_time = schedule_time(sched);
    HybridState s = scheduled_state(alpha, theta, input, sched);
    detail::Classifier cls;
    cls.label = [sched](Bits b) {
        switch (peak_index(b, sched)) {
            case 0:
                return std::string("ghz");
            case -2:
                return std::string("bell-q3-0");
            case 2:
                return std::string("bell-q3-1");
            case 4:
                return std::string("product-001");
            default:
                return std::string("product-110");
        }
    };
    cls.target = [](const std::string &label, const std::vector<Bits> &members) -> std::optional<QubitState> {
        if (label == "ghz" && members.size() == 2) {
            return states::ghz(3);
        }
        if (label == "bell-q3-0" && members.size() == 2) {
            return states::odd_bell().tensor(QubitState::basis(1, 0));
        }
        if (label == "bell-q3-1" && members.size() == 2) {
            return states::odd_bell().tensor(QubitState::basis(1, 1));
        }
        if (members.size() == 1) {
            return QubitState::basis(3, members.front());
        }
        return std::nullopt;
    };
    cls.entangling = [](const std::string &, const std::vector<Bits> &m) { return detail::pair_varies(m, 3); };
    t.outcomes = detail::homodyne_table(s, std::numbers::pi / 2, cls, t.peak_leakage);
    return t;
}

inline GateOutcome three_qubit_gate(double alpha, double theta, const QubitState &input,
                                    const OutcomeChoice &choice) {
    return select_outcome(three_qubit_table(alpha, theta, input), choice);
}

/// Cascaded n-qubit gate on |+>^n. Rows are labelled "k=<peak index>".
inline GateTable cascaded_table(std::size_t n, double alpha, double theta) {
    const auto sched = cascade_schedule(n);
    GateTable t;
    t.gate = "cascade-" + std::to_string(n);
    t.budget = error_budget(alpha, theta);
    t.warnings = t.budget.warnings;
    t.gate_time = schedule_time(sched);
    HybridState s = scheduled_state(alpha, theta, QubitState::plus(n), sched);
    detail::Classifier cls;
    cls.label = [sched](Bits b) {
        int k = peak_index(b, sched);
        return "k=" + std::string(k > 0 ? "+" : "") + std::to_string(k);
    };
    cls.target = [n](const std::string &, const std::vector<Bits> &members) -> std::optional<QubitState> {
        return detail::uniform_over(n, members);
    };
    cls.entangling = [n](const std::string &, const std::vector<Bits> &m) { return detail::pair_varies(m, n); };
    t.outcomes = detail::homodyne_table(s, std::numbers::pi / 2, cls, t.peak_leakage);
    return t;
}

inline GateOutcome cascaded_gate(std::size_t n, double alpha, double theta, const OutcomeChoice &choice) {
    return select_outcome(cascaded_table(n, alpha, theta), choice);
}

/// Pair-success probability of the cascade as an exact ratio of pattern counts.
inline std::pair<std::uint64_t, std::uint64_t> cascade_success_count(std::size_t n) {
    const auto sched = cascade_schedule(n);
    std::map<int, std::vector<Bits>> groups;
    for (Bits b = 0; b < (Bits{1} << n); b++) {
        groups[peak_index(b, sched)].push_back(b);
    }
    std::uint64_t good = 0;
    for (const auto &[k, members] : groups) {
        if (detail::pair_varies(members, n)) {
            good += members.size();
        }
    }
    return {good, std::uint64_t{1} << n};
}

// ---------------------------------------------------------------------------
// Measurement-free sequences.

struct Primitive {
    enum class Kind { CondRotation, CondDisplacement, Displacement };
    Kind kind = Kind::Displacement;
    std::size_t qubit = 0;
    double theta = 0;
    Complex beta;

    std::string str() const {
        char buf[160];
        switch (kind) {
            case Kind::CondRotation:
                std::snprintf(buf, sizeof buf, "R(q%zu, %.6g)", qubit, theta);
                break;
            case Kind::CondDisplacement:
                std::snprintf(buf, sizeof buf, "D(q%zu, %.6g%+.6gi)", qubit, beta.real(), beta.imag());
                break;
            case Kind::Displacement:
                std::snprintf(buf, sizeof buf, "D(%.6g%+.6gi)", beta.real(), beta.imag());
                break;
        }
        return buf;
    }
};

/// Primitives in time order (first element acts first).
struct InteractionSequence {
    std::size_t qubit_count = 0;
    std::vector<Primitive> steps;
    Corrections corrections;  // local frame that maps the |+>^n output onto the target

    void cond_rotation(std::size_t q, double theta) { push({Primitive::Kind::CondRotation, q, theta, 0.0}); }
    void cond_displacement(std::size_t q, Complex beta) {
        push({Primitive::Kind::CondDisplacement, q, 0.0, beta});
    }
    void displacement(Complex beta) { push({Primitive::Kind::Displacement, 0, 0.0, beta}); }

    HybridState run(const HybridState &state, std::size_t first = 0, std::size_t last = SIZE_MAX) const {
        if (steps.empty()) {
            throw std::logic_error("empty interaction sequence");
        }
        if (state.qubit_count() != qubit_count) {
            throw std::invalid_argument("sequence and state register sizes differ");
        }
        const std::size_t end = std::min(last, steps.size());
        bool displacements_only = true;
        for (std::size_t i = first; i < end; i++) {
            displacements_only = displacements_only && steps[i].kind != Primitive::Kind::CondRotation;
        }
        if (displacements_only) {
            return run_displacements(state, first, end);
        }
        HybridState s = state;
        for (std::size_t i = first; i < end; i++) {
            const auto &p = steps[i];
            switch (p.kind) {
                case Primitive::Kind::CondRotation:
                    s = apply_conditional_rotation(s, p.qubit, p.theta);
                    break;
                case Primitive::Kind::CondDisplacement:
                    s = apply_conditional_displacement(s, p.qubit, p.beta);
                    break;
                case Primitive::Kind::Displacement:
                    s = apply_displacement(s, p.beta);
                    break;
            }
        }
        return s;
    }

    /// Interactions touching qubit q.
    std::size_t interactions_on(std::size_t q) const {
        std::size_t c = 0;
        for (const auto &p : steps) {
            if (p.kind != Primitive::Kind::Displacement && p.qubit == q) {
                c++;
            }
        }
        return c;
    }

   private:
    /// Net displacement per branch is kept as integer multiples of the distinct
    /// step amplitudes, so a closed loop restores the start bus bit for bit.
    HybridState run_displacements(const HybridState &state, std::size_t first, std::size_t end) const {
        std::vector<Complex> basis;
        std::vector<std::size_t> slot(steps.size());
        for (std::size_t i = first; i < end; i++) {
            auto it = std::find(basis.begin(), basis.end(), steps[i].beta);
            slot[i] = static_cast<std::size_t>(it - basis.begin());
            if (it == basis.end()) {
                basis.push_back(steps[i].beta);
            }
        }
        const std::size_t n = state.qubit_count();
        return state.transformed([&](Branch &b) {
            const Complex start = b.bus;
            std::vector<long long> count(basis.size(), 0);
            auto net = [&] {
                Complex d = 0;
                for (std::size_t k = 0; k < basis.size(); k++) {
                    if (count[k] != 0) {
                        d += static_cast<double>(count[k]) * basis[k];
                    }
                }
                return d;
            };
            for (std::size_t i = first; i < end; i++) {
                const auto &p = steps[i];
                const int sign = p.kind == Primitive::Kind::CondDisplacement ? z_sign(b.bits, p.qubit, n) : 1;
                const Complex delta = static_cast<double>(sign) * p.beta;
                b.coeff *= std::polar(1.0, std::imag(delta * std::conj(start + net())));
                count[slot[i]] += sign;
            }
            const Complex d = net();
            b.bus = d == Complex(0, 0) ? start : start + d;
        });
    }

    void push(Primitive p) {
        if (p.kind != Primitive::Kind::Displacement && p.qubit >= qubit_count) {
            throw std::out_of_range("sequence qubit index out of range");
        }
        steps.push_back(p);
    }
};

/// Largest bus difference between branches that differ only on `qubits`.
inline double bus_spread_over(const HybridState &state, const std::vector<std::size_t> &qubits) {
    const std::size_t n = state.qubit_count();
    Bits mask = 0;
    for (std::size_t q : qubits) {
        mask |= Bits{1} << (n - 1 - q);
    }
    const auto &bs = state.branches();
    double spread = 0;
    for (std::size_t i = 0; i < bs.size(); i++) {
        for (std::size_t j = i + 1; j < bs.size(); j++) {
            if ((bs[i].bits & ~mask) == (bs[j].bits & ~mask)) {
                spread = std::max(spread, std::abs(bs[i].bus - bs[j].bus));
            }
        }
    }
    return spread;
}

struct GeometricResult {
    QubitState output;
    QubitState corrected;
    Corrections corrections;
    double coupling = 0;        // J in exp(i J s1 s2)
    double controlled_phase = 0;  // 4J modulo 2 pi, in (-pi, pi]
    bool is_cz = false;
    double bus_spread = 0;
};

/// D(beta1 sz1) D(beta2 sz2) D(-beta1 sz1) D(-beta2 sz2), first factor first.
inline InteractionSequence geometric_pair_sequence(Complex beta1, Complex beta2) {
    InteractionSequence seq;
    seq.qubit_count = 2;
    seq.cond_displacement(0, beta1);
    seq.cond_displacement(1, beta2);
    seq.cond_displacement(0, -beta1);
    seq.cond_displacement(1, -beta2);
    return seq;
}

/// Applies exp(i J sz1 sz2), J = 2 Im(conj(beta1) beta2), and reports the
/// Phase(2J) corrections that reduce it to a controlled phase of angle 4J.
inline GeometricResult geometric_cz(Complex beta1, Complex beta2, const QubitState &input, Complex bus = 0.0) {
    detail::require_size(input, 2);
    InteractionSequence seq = geometric_pair_sequence(beta1, beta2);
    HybridState s = seq.run(HybridState::from_qubits(input, bus));
    GeometricResult r;
    r.bus_spread = bus_spread(s);
    r.output = extract_qubits(s, 1e-9);
    r.coupling = 2 * std::imag(std::conj(beta1) * beta2);
    double cp = std::remainder(4 * r.coupling, 2 * std::numbers::pi);
    r.controlled_phase = cp;
    double lin = std::remainder(2 * r.coupling, 2 * std::numbers::pi);
    if (std::abs(lin) > 1e-15) {
        r.corrections = {LocalCorrection::phase(0, lin), LocalCorrection::phase(1, lin)};
    }
    r.is_cz = std::abs(std::abs(cp) - std::numbers::pi) < 1e-12;
    r.corrected = r.output.corrected(r.corrections);
    return r;
}

/// Two-qubit controlled-Z applied to a state vector.
inline QubitState apply_cz(QubitState s, std::size_t a, std::size_t b) {
    const std::size_t n = s.qubit_count;
    for (std::size_t i = 0; i < s.dim(); i++) {
        if (bit_of(i, a, n) && bit_of(i, b, n)) {
            s.amplitudes[i] = -s.amplitudes[i];
        }
    }
    return s;
}

struct CompiledDisplacement {
    InteractionSequence sequence;
    Complex net;               // conditional displacement achieved: 2 i alpha sin(theta)
    Corrections corrections;   // residual qubit-local phase (empty when exact)
    double residual_phase = 0; // relative phase between the two qubit branches
};

/// Conditional displacement D(2 i alpha sin(theta) sz) from rotations and
/// unconditional displacements. Applied first to last:
/// D(alpha cos) R(theta) D(-2 alpha) R(-theta) D(alpha cos).
inline CompiledDisplacement compile_conditional_displacement(double alpha, double theta, std::size_t q,
                                                             std::size_t qubit_count = 1, Complex probe = 0.37) {
    CompiledDisplacement c;
    c.sequence.qubit_count = qubit_count;
    c.sequence.displacement(alpha * std::cos(theta));
    c.sequence.cond_rotation(q, theta);
    c.sequence.displacement(-2 * alpha);
    c.sequence.cond_rotation(q, -theta);
    c.sequence.displacement(alpha * std::cos(theta));
    c.net = Complex(0, 2 * alpha * std::sin(theta));
    // Residual: compare both routes on a single qubit starting from |+> and a probe bus.
    InteractionSequence single = c.sequence;
    single.qubit_count = 1;
    for (auto &p : single.steps) {
        p.qubit = 0;
    }
    HybridState start = HybridState::from_qubits(QubitState::plus(1), probe);
    HybridState compiled = single.run(start);
    HybridState direct = apply_conditional_displacement(start, 0, c.net);
    Complex ratio[2];
    for (const auto &bc : compiled.branches()) {
        for (const auto &bd : direct.branches()) {
            if (bc.bits == bd.bits) {
                if (std::abs(bc.bus - bd.bus) > 1e-9 * std::max(1.0, std::abs(alpha))) {
                    throw std::logic_error("compiled displacement does not reach the target bus");
                }
                ratio[bc.bits] = bc.coeff / bd.coeff;
            }
        }
    }
    c.residual_phase = std::arg(ratio[0] / ratio[1]);
    if (std::abs(c.residual_phase) > 1e-12) {
        c.corrections.push_back(LocalCorrection::phase(q, c.residual_phase));
    }
    return c;
}

/// Local Z-phase corrections that turn a uniform-magnitude phase state into
/// the graph state of `spec` exactly (up to global phase), if they exist.
inline std::optional<Corrections> graph_corrections(const QubitState &state, const GraphSpec &spec) {
    const std::size_t n = state.qubit_count;
    if (spec.vertex_count != n) {
        throw std::invalid_argument("qubit count mismatch");
    }
    Corrections cs;
    const Complex a0 = state.amplitudes[0];
    if (std::abs(a0) < 1e-12) {
        return std::nullopt;
    }
    for (std::size_t q = 0; q < n; q++) {
        double lin = std::arg(state.amplitudes[flip_bit(0, q, n)] / a0);
        if (std::abs(lin) > 1e-13) {
            cs.push_back(LocalCorrection::phase(q, -lin));
        }
    }
    QubitState fixed = state.corrected(cs);
    StabilizerTableau tab;
    try {
        tab = tableau_from_phase_state(fixed);
    } catch (const std::domain_error &) {
        return std::nullopt;
    }
    auto frame = graph_frame_corrections(tab, spec);
    if (!frame) {
        return std::nullopt;
    }
    for (const auto &z : *frame) {
        cs.push_back(z);
    }
    return cs;
}

/// Star graph centred on qubit 0: qubit 0 displaced along i beta, the others
/// along beta, each exactly twice.
inline InteractionSequence star_sequence(std::size_t n, double beta) {
    if (n < 2) {
        throw std::invalid_argument("star sequence needs at least 2 qubits");
    }
    InteractionSequence seq;
    seq.qubit_count = n;
    seq.cond_displacement(0, Complex(0, beta));
    for (std::size_t q = 1; q < n; q++) {
        seq.cond_displacement(q, beta);
    }
    seq.cond_displacement(0, Complex(0, -beta));
    for (std::size_t q = 1; q < n; q++) {
        seq.cond_displacement(q, -beta);
    }
    return seq;
}

/// Linear graph: qubit k displaced along i beta for even k, beta for odd k.
/// Each qubit's second interaction follows its right neighbour's first.
inline InteractionSequence chain_sequence(std::size_t n, double beta) {
    if (n < 2) {
        throw std::invalid_argument("chain sequence needs at least 2 qubits");
    }
    auto dir = [&](std::size_t k) { return k % 2 == 0 ? Complex(0, beta) : Complex(beta, 0); };
    InteractionSequence seq;
    seq.qubit_count = n;
    seq.cond_displacement(0, dir(0));
    for (std::size_t k = 1; k < n; k++) {
        seq.cond_displacement(k, dir(k));
        seq.cond_displacement(k - 1, -dir(k - 1));
    }
    seq.cond_displacement(n - 1, -dir(n - 1));
    return seq;
}

struct SequenceCheck {
    QubitState output;
    double bus_spread = 0;
    std::optional<Corrections> corrections;
    bool stabilizer_pass = false;
};

/// Runs `seq` on |+>^n with bus `bus` and checks the output against `spec`.
inline SequenceCheck check_sequence(InteractionSequence &seq, const GraphSpec &spec, Complex bus = 0.0) {
    SequenceCheck c;
    HybridState s = seq.run(init_plus_state(seq.qubit_count, bus));
    c.bus_spread = bus_spread(s);
    c.output = extract_qubits(s, 1e-9);
    c.corrections = graph_corrections(c.output, spec);
    if (c.corrections) {
        seq.corrections = *c.corrections;
        StabilizerTableau tab = tableau_from_phase_state(c.output.corrected(*c.corrections));
        c.stabilizer_pass = tab.same_group(graph_state(spec));
    }
    return c;
}

}  // namespace qubus
