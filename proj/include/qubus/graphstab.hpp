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

// Stabilizer tableaux for graph and cluster states: Pauli measurements,
// chain fusion, T-joins and failure recovery.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qubus/qubit_state.hpp"
#include "qubus/rng.hpp"

namespace qubus {

/// i^phase * prod_j sigma(x_j, z_j), with sigma(1,1) = Y.
struct PauliString {
    std::vector<std::uint8_t> xs;
    std::vector<std::uint8_t> zs;
    int phase = 0;

    PauliString() = default;
    explicit PauliString(std::size_t n) : xs(n, 0), zs(n, 0) {}

    static PauliString from_string(const std::string &text) {
        std::size_t start = 0;
        int phase = 0;
        if (!text.empty() && (text[0] == '+' || text[0] == '-')) {
            phase = text[0] == '-' ? 2 : 0;
            start = 1;
        }
        PauliString p(text.size() - start);
        p.phase = phase;
        for (std::size_t k = start; k < text.size(); k++) {
            std::size_t q = k - start;
            switch (text[k]) {
                case 'I':
                case '_':
                    break;
                case 'X':
                    p.xs[q] = 1;
                    break;
                case 'Z':
                    p.zs[q] = 1;
                    break;
                case 'Y':
                    p.xs[q] = 1;
                    p.zs[q] = 1;
                    break;
                default:
                    throw std::invalid_argument("unknown Pauli character in " + text);
            }
        }
        return p;
    }

    static PauliString single(std::size_t n, std::size_t q, char basis) {
        PauliString p(n);
        if (q >= n) {
            throw std::out_of_range("qubit index out of range");
        }
        switch (basis) {
            case 'X':
                p.xs[q] = 1;
                break;
            case 'Y':
                p.xs[q] = 1;
                p.zs[q] = 1;
                break;
            case 'Z':
                p.zs[q] = 1;
                break;
            default:
                throw std::invalid_argument("invalid measurement basis");
        }
        return p;
    }

    std::size_t size() const { return xs.size(); }

    bool is_identity_on(std::size_t q) const { return !xs[q] && !zs[q]; }

    bool weight_zero() const {
        for (std::size_t q = 0; q < size(); q++) {
            if (!is_identity_on(q)) {
                return false;
            }
        }
        return true;
    }

    bool hermitian() const { return (phase & 1) == 0; }
    int sign() const { return (phase & 3) == 0 ? +1 : -1; }

    bool commutes(const PauliString &o) const {
        unsigned acc = 0;
        for (std::size_t q = 0; q < size(); q++) {
            acc ^= (xs[q] & o.zs[q]) ^ (zs[q] & o.xs[q]);
        }
        return acc == 0;
    }

    bool same_operator(const PauliString &o) const { return xs == o.xs && zs == o.zs; }

    /// this * other.
    PauliString times(const PauliString &o) const {
        if (o.size() != size()) {
            throw std::invalid_argument("Pauli length mismatch");
        }
        PauliString r(size());
        int ph = phase + o.phase;
        for (std::size_t q = 0; q < size(); q++) {
            int x1 = xs[q], z1 = zs[q], x2 = o.xs[q], z2 = o.zs[q];
            int g = 0;
            if (x1 && z1) {
                g = z2 - x2;
            } else if (x1) {
                g = z2 * (2 * x2 - 1);
            } else if (z1) {
                g = x2 * (1 - 2 * z2);
            }
            ph += g;
            r.xs[q] = static_cast<std::uint8_t>(x1 ^ x2);
            r.zs[q] = static_cast<std::uint8_t>(z1 ^ z2);
        }
        r.phase = ((ph % 4) + 4) % 4;
        return r;
    }

    PauliString negated() const {
        PauliString r = *this;
        r.phase = (r.phase + 2) % 4;
        return r;
    }

    std::string str() const {
        std::string out;
        switch (phase & 3) {
            case 0:
                out = "+";
                break;
            case 1:
                out = "+i";
                break;
            case 2:
                out = "-";
                break;
            default:
                out = "-i";
                break;
        }
        for (std::size_t q = 0; q < size(); q++) {
            out += xs[q] ? (zs[q] ? 'Y' : 'X') : (zs[q] ? 'Z' : 'I');
        }
        return out;
    }

    bool operator==(const PauliString &) const = default;
};

/// Undirected simple graph on vertices 0..vertex_count-1.
struct GraphSpec {
    std::size_t vertex_count = 0;
    std::set<std::pair<std::size_t, std::size_t>> edges;  // stored with first < second

    GraphSpec() = default;
    explicit GraphSpec(std::size_t n) : vertex_count(n) {}
    GraphSpec(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>> &edge_list) : vertex_count(n) {
        for (auto [u, v] : edge_list) {
            add_edge(u, v);
        }
    }

    void add_edge(std::size_t u, std::size_t v) {
        if (u == v) {
            throw std::invalid_argument("self-loops are not allowed");
        }
        if (u >= vertex_count || v >= vertex_count) {
            throw std::out_of_range("edge endpoint out of range");
        }
        edges.insert(std::minmax(u, v));
    }

    void remove_edge(std::size_t u, std::size_t v) { edges.erase(std::minmax(u, v)); }

    bool has_edge(std::size_t u, std::size_t v) const { return edges.count(std::minmax(u, v)) > 0; }

    std::vector<std::size_t> neighbors(std::size_t v) const {
        std::vector<std::size_t> out;
        for (auto [a, b] : edges) {
            if (a == v) {
                out.push_back(b);
            } else if (b == v) {
                out.push_back(a);
            }
        }
        return out;
    }

    std::size_t degree(std::size_t v) const { return neighbors(v).size(); }

    /// Graph with vertex v deleted; higher indices shift down by one.
    GraphSpec without_vertex(std::size_t v) const {
        GraphSpec g(vertex_count - 1);
        for (auto [a, b] : edges) {
            if (a == v || b == v) {
                continue;
            }
            g.add_edge(a > v ? a - 1 : a, b > v ? b - 1 : b);
        }
        return g;
    }

    static GraphSpec chain(std::size_t n) {
        GraphSpec g(n);
        for (std::size_t i = 0; i + 1 < n; i++) {
            g.add_edge(i, i + 1);
        }
        return g;
    }

    static GraphSpec star(std::size_t n, std::size_t center = 0) {
        GraphSpec g(n);
        for (std::size_t i = 0; i < n; i++) {
            if (i != center) {
                g.add_edge(center, i);
            }
        }
        return g;
    }

    /// Disjoint union; `other` is relabelled to follow this graph's vertices.
    GraphSpec disjoint_union(const GraphSpec &other) const {
        GraphSpec g(vertex_count + other.vertex_count);
        g.edges = edges;
        for (auto [a, b] : other.edges) {
            g.add_edge(a + vertex_count, b + vertex_count);
        }
        return g;
    }

    bool operator==(const GraphSpec &) const = default;
};

/// Parses "u v" pairs, one per line. Blank lines and '#' comments are ignored.
/// The vertex count is the largest index plus one unless `vertex_count` is given.
inline GraphSpec parse_edge_list(const std::string &text, std::optional<std::size_t> vertex_count = std::nullopt) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::size_t max_index = 0;
    bool any = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream ls(line);
        long long u = 0, v = 0;
        if (!(ls >> u)) {
            continue;
        }
        std::string rest;
        if (!(ls >> v) || (ls >> rest) || u < 0 || v < 0) {
            throw std::invalid_argument("malformed edge on line " + std::to_string(line_no));
        }
        edges.emplace_back(static_cast<std::size_t>(u), static_cast<std::size_t>(v));
        max_index = std::max({max_index, static_cast<std::size_t>(u), static_cast<std::size_t>(v)});
        any = true;
    }
    std::size_t n = vertex_count.value_or(any ? max_index + 1 : 0);
    return GraphSpec(n, edges);
}

inline std::string to_edge_list(const GraphSpec &g) {
    std::string out;
    for (auto [a, b] : g.edges) {
        out += std::to_string(a) + " " + std::to_string(b) + "\n";
    }
    return out;
}

class StabilizerTableau {
   public:
    StabilizerTableau() = default;

    /// Validates that the generators commute and are independent.
    StabilizerTableau(std::size_t n, std::vector<PauliString> generators)
        : n_(n), generators_(std::move(generators)) {
        if (generators_.size() != n_) {
            throw std::invalid_argument("need exactly n generators");
        }
        for (const auto &g : generators_) {
            if (g.size() != n_ || !g.hermitian()) {
                throw std::invalid_argument("generator must be a Hermitian Pauli on n qubits");
            }
        }
        validate();
    }

    static StabilizerTableau from_strings(const std::vector<std::string> &rows) {
        std::vector<PauliString> gens;
        for (const auto &r : rows) {
            gens.push_back(PauliString::from_string(r));
        }
        std::size_t n = gens.empty() ? 0 : gens.front().size();
        return {n, std::move(gens)};
    }

    /// |0...0>.
    static StabilizerTableau zeros(std::size_t n) {
        std::vector<PauliString> gens;
        for (std::size_t q = 0; q < n; q++) {
            gens.push_back(PauliString::single(n, q, 'Z'));
        }
        return {n, std::move(gens)};
    }

    std::size_t qubit_count() const { return n_; }
    const std::vector<PauliString> &generators() const { return generators_; }

    void validate() const {
        for (std::size_t i = 0; i < n_; i++) {
            for (std::size_t j = i + 1; j < n_; j++) {
                if (!generators_[i].commutes(generators_[j])) {
                    throw std::invalid_argument("stabilizer generators do not commute");
                }
            }
        }
        if (rank() != n_) {
            throw std::invalid_argument("stabilizer generators are not independent");
        }
    }

    // Clifford gates -------------------------------------------------------

    void h(std::size_t q) {
        check(q);
        for (auto &g : generators_) {
            if (g.xs[q] && g.zs[q]) {
                g.phase = (g.phase + 2) % 4;
            }
            std::swap(g.xs[q], g.zs[q]);
        }
    }

    void s(std::size_t q) {
        check(q);
        for (auto &g : generators_) {
            if (g.xs[q] && g.zs[q]) {
                g.phase = (g.phase + 2) % 4;
            }
            g.zs[q] ^= g.xs[q];
        }
    }

    void x(std::size_t q) {
        check(q);
        for (auto &g : generators_) {
            if (g.zs[q]) {
                g.phase = (g.phase + 2) % 4;
            }
        }
    }

    void z(std::size_t q) {
        check(q);
        for (auto &g : generators_) {
            if (g.xs[q]) {
                g.phase = (g.phase + 2) % 4;
            }
        }
    }

    void y(std::size_t q) {
        check(q);
        for (auto &g : generators_) {
            if (g.xs[q] ^ g.zs[q]) {
                g.phase = (g.phase + 2) % 4;
            }
        }
    }

    void cnot(std::size_t c, std::size_t t) {
        check(c);
        check(t);
        if (c == t) {
            throw std::invalid_argument("cnot needs distinct qubits");
        }
        for (auto &g : generators_) {
            if (g.xs[c] && g.zs[t] && (g.xs[t] ^ g.zs[c] ^ 1)) {
                g.phase = (g.phase + 2) % 4;
            }
            g.xs[t] ^= g.xs[c];
            g.zs[c] ^= g.zs[t];
        }
    }

    void cz(std::size_t a, std::size_t b) {
        h(b);
        cnot(a, b);
        h(b);
    }

    /// Applies a local correction; phase angles must be multiples of pi/2.
    void apply(const LocalCorrection &c) {
        switch (c.kind) {
            case LocalCorrection::Kind::X:
                x(c.qubit);
                return;
            case LocalCorrection::Kind::Y:
                y(c.qubit);
                return;
            case LocalCorrection::Kind::Z:
                z(c.qubit);
                return;
            case LocalCorrection::Kind::H:
                h(c.qubit);
                return;
            case LocalCorrection::Kind::Phase: {
                double quarter = c.angle / (std::numbers::pi / 2);
                double rounded = std::round(quarter);
                if (std::abs(quarter - rounded) > 1e-9) {
                    throw std::invalid_argument("phase correction is not Clifford");
                }
                int k = ((static_cast<int>(rounded) % 4) + 4) % 4;
                for (int i = 0; i < k; i++) {
                    s(c.qubit);
                }
                return;
            }
        }
    }

    void apply(const Corrections &cs) {
        for (const auto &c : cs) {
            apply(c);
        }
    }

    // Group algebra --------------------------------------------------------

    /// Indices of generators whose product is +-p (up to phase), if p lies in the group.
    std::optional<std::vector<std::size_t>> decompose(const PauliString &p) const {
        // Row-reduce [generator bits | identity] and solve for p's bits.
        const std::size_t w = 2 * n_;
        std::vector<std::vector<std::uint8_t>> rows(n_, std::vector<std::uint8_t>(w + n_, 0));
        for (std::size_t i = 0; i < n_; i++) {
            for (std::size_t q = 0; q < n_; q++) {
                rows[i][q] = generators_[i].xs[q];
                rows[i][n_ + q] = generators_[i].zs[q];
            }
            rows[i][w + i] = 1;
        }
        std::vector<std::uint8_t> target(w + n_, 0);
        for (std::size_t q = 0; q < n_; q++) {
            target[q] = p.xs[q];
            target[n_ + q] = p.zs[q];
        }
        std::size_t r = 0;
        for (std::size_t col = 0; col < w && r < n_; col++) {
            std::size_t piv = r;
            while (piv < n_ && !rows[piv][col]) {
                piv++;
            }
            if (piv == n_) {
                continue;
            }
            std::swap(rows[r], rows[piv]);
            for (std::size_t i = 0; i < n_; i++) {
                if (i != r && rows[i][col]) {
                    xor_into(rows[i], rows[r]);
                }
            }
            if (target[col]) {
                xor_into(target, rows[r]);
            }
            r++;
        }
        for (std::size_t col = 0; col < w; col++) {
            if (target[col]) {
                return std::nullopt;
            }
        }
        std::vector<std::size_t> used;
        for (std::size_t i = 0; i < n_; i++) {
            if (target[w + i]) {
                used.push_back(i);
            }
        }
        return used;
    }

    /// Product of the listed generators (in order).
    PauliString product(const std::vector<std::size_t> &idx) const {
        PauliString acc(n_);
        for (std::size_t i : idx) {
            acc = acc.times(generators_[i]);
        }
        return acc;
    }

    /// +1 / -1 when +-p is in the stabilizer group, 0 when p is not (up to sign).
    int expectation(const PauliString &p) const {
        auto idx = decompose(p);
        if (!idx) {
            return 0;
        }
        PauliString prod = product(*idx);
        // prod = i^k p' with p' the same operator as p modulo its own phase.
        int rel = ((prod.phase - p.phase) % 4 + 4) % 4;
        if (rel == 0) {
            return +1;
        }
        if (rel == 2) {
            return -1;
        }
        throw std::logic_error("non-Hermitian group element");
    }

    std::size_t rank() const {
        std::vector<std::vector<std::uint8_t>> rows;
        for (const auto &g : generators_) {
            std::vector<std::uint8_t> r(2 * n_);
            for (std::size_t q = 0; q < n_; q++) {
                r[q] = g.xs[q];
                r[n_ + q] = g.zs[q];
            }
            rows.push_back(std::move(r));
        }
        std::size_t rk = 0;
        for (std::size_t col = 0; col < 2 * n_ && rk < rows.size(); col++) {
            std::size_t piv = rk;
            while (piv < rows.size() && !rows[piv][col]) {
                piv++;
            }
            if (piv == rows.size()) {
                continue;
            }
            std::swap(rows[rk], rows[piv]);
            for (std::size_t i = 0; i < rows.size(); i++) {
                if (i != rk && rows[i][col]) {
                    xor_into(rows[i], rows[rk]);
                }
            }
            rk++;
        }
        return rk;
    }

    /// Fully reduced row-echelon generators; equal for equal stabilizer groups.
    std::vector<PauliString> canonical() const {
        std::vector<PauliString> rows = generators_;
        std::size_t r = 0;
        for (std::size_t col = 0; col < 2 * n_ && r < n_; col++) {
            auto bit = [&](const PauliString &p) { return col < n_ ? p.xs[col] : p.zs[col - n_]; };
            std::size_t piv = r;
            while (piv < n_ && !bit(rows[piv])) {
                piv++;
            }
            if (piv == n_) {
                continue;
            }
            std::swap(rows[r], rows[piv]);
            for (std::size_t i = 0; i < n_; i++) {
                if (i != r && bit(rows[i])) {
                    rows[i] = rows[i].times(rows[r]);
                }
            }
            r++;
        }
        return rows;
    }

    bool same_group(const StabilizerTableau &other) const {
        return n_ == other.n_ && canonical() == other.canonical();
    }

    // Measurement ----------------------------------------------------------

    struct Measurement {
        int outcome = +1;
        double probability = 1.0;
        bool deterministic = true;
    };

    /// Measures the Hermitian Pauli `p`. A forced outcome is projected onto;
    /// forcing an impossible outcome throws.
    Measurement measure(const PauliString &p, std::optional<int> forced = std::nullopt, Rng *rng = nullptr) {
        if (p.size() != n_ || !p.hermitian() || p.weight_zero()) {
            throw std::invalid_argument("observable must be a non-trivial Hermitian Pauli on n qubits");
        }
        if (forced && *forced != 1 && *forced != -1) {
            throw std::invalid_argument("forced outcome must be +1 or -1");
        }
        std::optional<std::size_t> first;
        for (std::size_t i = 0; i < n_; i++) {
            if (!generators_[i].commutes(p)) {
                if (!first) {
                    first = i;
                } else {
                    generators_[i] = generators_[i].times(generators_[*first]);
                }
            }
        }
        Measurement m;
        if (!first) {
            m.outcome = expectation(p);
            m.deterministic = true;
            m.probability = 1.0;
            if (forced && *forced != m.outcome) {
                throw std::domain_error("forced measurement outcome has zero probability");
            }
            return m;
        }
        m.deterministic = false;
        m.probability = 0.5;
        if (forced) {
            m.outcome = *forced;
        } else if (rng != nullptr) {
            m.outcome = rng->sign();
        } else {
            throw std::invalid_argument("random measurement needs a forced outcome or an Rng");
        }
        generators_[*first] = m.outcome == 1 ? p : p.negated();
        return m;
    }

    Measurement measure_single(std::size_t q, char basis, std::optional<int> forced = std::nullopt,
                               Rng *rng = nullptr) {
        return measure(PauliString::single(n_, q, basis), forced, rng);
    }

    /// Drops qubit q, which must be in a product state with the rest.
    /// Returns the single-qubit stabilizer it carried.
    PauliString remove_qubit(std::size_t q) {
        check(q);
        std::vector<PauliString> rows = generators_;
        auto touches = [&](const PauliString &p) { return !p.is_identity_on(q); };
        std::vector<std::size_t> pivots;
        for (int pass = 0; pass < 2; pass++) {
            for (std::size_t i = 0; i < n_; i++) {
                if (std::find(pivots.begin(), pivots.end(), i) != pivots.end()) {
                    continue;
                }
                bool hit = pass == 0 ? rows[i].xs[q] : rows[i].zs[q];
                if (!hit) {
                    continue;
                }
                for (std::size_t j = 0; j < n_; j++) {
                    if (j == i || std::find(pivots.begin(), pivots.end(), j) != pivots.end()) {
                        continue;
                    }
                    bool hj = pass == 0 ? rows[j].xs[q] : rows[j].zs[q];
                    if (hj) {
                        rows[j] = rows[j].times(rows[i]);
                    }
                }
                pivots.push_back(i);
                break;
            }
        }
        if (pivots.size() != 1) {
            throw std::domain_error("qubit is entangled with the rest of the register");
        }
        PauliString local = rows[pivots[0]];
        // Strip the rest of the pivot using rows that act trivially on q.
        std::vector<PauliString> rest;
        for (std::size_t i = 0; i < n_; i++) {
            if (i != pivots[0]) {
                if (touches(rows[i])) {
                    throw std::logic_error("elimination left support on removed qubit");
                }
                rest.push_back(rows[i]);
            }
        }
        PauliString residual = local;
        residual.xs[q] = 0;
        residual.zs[q] = 0;
        if (!residual.weight_zero()) {
            StabilizerTableau partial;
            partial.n_ = n_;
            partial.generators_ = rest;
            partial.generators_.push_back(PauliString::single(n_, q, 'Z'));
            auto idx = partial.decompose(residual);
            if (!idx || std::find(idx->begin(), idx->end(), rest.size()) != idx->end()) {
                throw std::domain_error("qubit is entangled with the rest of the register");
            }
            for (std::size_t i : *idx) {
                local = local.times(rest[i]);
            }
        }
        PauliString single(1);
        single.xs[0] = local.xs[q];
        single.zs[0] = local.zs[q];
        single.phase = local.phase;
        std::vector<PauliString> reduced;
        for (auto &r : rest) {
            PauliString p(n_ - 1);
            for (std::size_t k = 0, j = 0; k < n_; k++) {
                if (k == q) {
                    continue;
                }
                p.xs[j] = r.xs[k];
                p.zs[j] = r.zs[k];
                j++;
            }
            p.phase = r.phase;
            reduced.push_back(std::move(p));
        }
        n_ -= 1;
        generators_ = std::move(reduced);
        validate();
        return single;
    }

    std::string str() const {
        std::string out;
        for (const auto &g : generators_) {
            out += g.str() + "\n";
        }
        return out;
    }

   private:
    void check(std::size_t q) const {
        if (q >= n_) {
            throw std::out_of_range("qubit index out of range");
        }
    }

    static void xor_into(std::vector<std::uint8_t> &dst, const std::vector<std::uint8_t> &src) {
        for (std::size_t k = 0; k < dst.size(); k++) {
            dst[k] ^= src[k];
        }
    }

    std::size_t n_ = 0;
    std::vector<PauliString> generators_;
};

/// Generator i = X_i prod_{j in N(i)} Z_j.
inline StabilizerTableau graph_state(const GraphSpec &spec) {
    std::vector<PauliString> gens;
    for (std::size_t i = 0; i < spec.vertex_count; i++) {
        PauliString p(spec.vertex_count);
        p.xs[i] = 1;
        for (std::size_t j : spec.neighbors(i)) {
            p.zs[j] = 1;
        }
        gens.push_back(std::move(p));
    }
    return {spec.vertex_count, std::move(gens)};
}

/// True iff applying `corrections` to `tab` yields exactly the graph state of `spec`.
inline bool equals_up_to_corrections(const StabilizerTableau &tab, const GraphSpec &spec,
                                     const Corrections &corrections) {
    if (tab.qubit_count() != spec.vertex_count) {
        throw std::invalid_argument("qubit count mismatch");
    }
    StabilizerTableau t = tab;
    t.apply(corrections);
    return t.same_group(graph_state(spec));
}

/// Z corrections that take `tab` to the graph state of `spec`, when `tab` is
/// that graph state up to a Z frame.
inline std::optional<Corrections> graph_frame_corrections(const StabilizerTableau &tab, const GraphSpec &spec) {
    StabilizerTableau target = graph_state(spec);
    Corrections cs;
    for (std::size_t i = 0; i < spec.vertex_count; i++) {
        int e = tab.expectation(target.generators()[i]);
        if (e == 0) {
            return std::nullopt;
        }
        if (e == -1) {
            cs.push_back(LocalCorrection::pauli_z(i));
        }
    }
    if (!equals_up_to_corrections(tab, spec, cs)) {
        return std::nullopt;
    }
    return cs;
}

/// Stabilizer tableau of a uniform-magnitude state whose phases form a
/// quadratic phase polynomial with Clifford coefficients.
inline StabilizerTableau tableau_from_phase_state(const QubitState &state, double tol = 1e-9) {
    const std::size_t n = state.qubit_count;
    const std::size_t dim = state.dim();
    const double mag = 1.0 / std::sqrt(static_cast<double>(dim));
    for (const auto &a : state.amplitudes) {
        if (std::abs(std::abs(a) - mag) > tol) {
            throw std::domain_error("state does not have uniform magnitudes");
        }
    }
    const double half_pi = std::numbers::pi / 2;
    auto f = [&](std::size_t i) { return std::arg(state.amplitudes[i] / state.amplitudes[0]); };
    auto quarter_turns = [&](double angle) {
        double k = angle / half_pi;
        double r = std::round(k);
        if (std::abs(k - r) > 1e-6) {
            throw std::domain_error("phase polynomial is not Clifford");
        }
        return ((static_cast<int>(r) % 4) + 4) % 4;
    };
    std::vector<PauliString> gens;
    for (std::size_t q = 0; q < n; q++) {
        auto g = [&](std::size_t x) { return f(flip_bit(x, q, n)) - f(x); };
        int c = quarter_turns(g(0));
        std::vector<std::uint8_t> m(n, 0);
        for (std::size_t r = 0; r < n; r++) {
            int k = (quarter_turns(g(flip_bit(0, r, n))) - c + 4) % 4;
            if (k != 0 && k != 2) {
                throw std::domain_error("phase difference is not a Pauli");
            }
            m[r] = k == 2;
        }
        for (std::size_t x = 0; x < dim; x++) {
            int expect = c;
            for (std::size_t r = 0; r < n; r++) {
                if (m[r] && bit_of(x, r, n)) {
                    expect += 2;
                }
            }
            if (quarter_turns(g(x)) != expect % 4) {
                throw std::domain_error("phase difference is not affine");
            }
        }
        PauliString p = PauliString::single(n, q, 'X');
        p.phase = c;
        for (std::size_t r = 0; r < n; r++) {
            if (m[r]) {
                p = p.times(PauliString::single(n, r, 'Z'));
            }
        }
        gens.push_back(std::move(p));
    }
    return {n, std::move(gens)};
}

// ---------------------------------------------------------------------------
// Cluster bookkeeping: tableau plus the graph it is expected to equal up to a
// Z frame, and the set of qubits measured out but not yet removed.

enum class FuseVariant { Parity2, Gate3 };

struct FuseResult {
    std::string label;
    bool success = false;
    double probability = 1.0;
    Corrections corrections;           // Z frame, in current tableau indices
    std::vector<std::size_t> measured; // qubits left in Z eigenstates, awaiting recover_failure
    std::vector<std::string> warnings;
};

inline std::vector<std::string> fuse_outcome_labels(FuseVariant v) {
    if (v == FuseVariant::Parity2) {
        return {"even", "odd", "product-00", "product-11"};
    }
    return {"ghz", "bell-q3-0", "bell-q3-1", "product-001", "product-110"};
}

class ClusterState {
   public:
    ClusterState() = default;

    explicit ClusterState(const GraphSpec &graph) : tableau_(graph_state(graph)), graph_(graph) {}

    /// Disjoint chains of the given lengths, numbered consecutively.
    static ClusterState chains(const std::vector<std::size_t> &lengths) {
        GraphSpec g(0);
        for (std::size_t len : lengths) {
            g = g.disjoint_union(GraphSpec::chain(len));
        }
        return ClusterState(g);
    }

    const StabilizerTableau &tableau() const { return tableau_; }
    StabilizerTableau &mutable_tableau() { return tableau_; }
    const GraphSpec &graph() const { return graph_; }
    const std::set<std::size_t> &measured() const { return measured_; }
    std::size_t qubit_count() const { return tableau_.qubit_count(); }
    std::size_t degree(std::size_t q) const { return graph_.degree(q); }

    /// Connected components of the expected graph (measured qubits excluded).
    std::vector<std::vector<std::size_t>> components() const {
        std::vector<int> seen(graph_.vertex_count, 0);
        std::vector<std::vector<std::size_t>> out;
        for (std::size_t s = 0; s < graph_.vertex_count; s++) {
            if (seen[s] || measured_.count(s)) {
                continue;
            }
            std::vector<std::size_t> comp{s}, stack{s};
            seen[s] = 1;
            while (!stack.empty()) {
                std::size_t v = stack.back();
                stack.pop_back();
                for (std::size_t w : graph_.neighbors(v)) {
                    if (!seen[w] && !measured_.count(w)) {
                        seen[w] = 1;
                        comp.push_back(w);
                        stack.push_back(w);
                    }
                }
            }
            std::sort(comp.begin(), comp.end());
            out.push_back(std::move(comp));
        }
        return out;
    }

    /// Expected graph with measured qubits deleted, and the tableau reduced the same way.
    std::pair<StabilizerTableau, GraphSpec> active_view() const {
        StabilizerTableau t = tableau_;
        GraphSpec g = graph_;
        for (auto it = measured_.rbegin(); it != measured_.rend(); ++it) {
            t.remove_qubit(*it);
            g = g.without_vertex(*it);
        }
        return {t, g};
    }

    /// Z frame relative to the active expected graph (indices of the active view).
    std::optional<Corrections> frame_corrections() const {
        auto [t, g] = active_view();
        return graph_frame_corrections(t, g);
    }

    /// Z measurement that leaves qubit q pending removal by recover_failure.
    int measure_out(std::size_t q, std::optional<int> forced = std::nullopt, Rng *rng = nullptr) {
        if (q >= qubit_count() || measured_.count(q)) {
            throw std::invalid_argument("qubit is out of range or already measured");
        }
        auto m = tableau_.measure_single(q, 'Z', forced, rng);
        measured_.insert(q);
        return m.outcome;
    }

    /// Measured-out end qubit: Z measurement, conditional Z on its neighbour, removal.
    void recover_failure(std::size_t end_qubit) {
        if (end_qubit >= qubit_count()) {
            throw std::out_of_range("qubit index out of range");
        }
        auto nbrs = graph_.neighbors(end_qubit);
        if (nbrs.size() > 1) {
            throw std::invalid_argument("recovery of interior qubits is not supported (degree > 1)");
        }
        auto m = tableau_.measure_single(end_qubit, 'Z', measured_.count(end_qubit) ? std::nullopt
                                                                                    : std::optional<int>(+1));
        if (m.outcome == -1) {
            for (std::size_t v : nbrs) {
                tableau_.z(v);
            }
        }
        tableau_.remove_qubit(end_qubit);
        graph_ = graph_.without_vertex(end_qubit);
        std::set<std::size_t> shifted;
        for (std::size_t q : measured_) {
            if (q != end_qubit) {
                shifted.insert(q > end_qubit ? q - 1 : q);
            }
        }
        measured_ = std::move(shifted);
    }

    /// Random-outcome variant of recover_failure for qubits not yet measured.
    void recover_failure(std::size_t end_qubit, Rng &rng) {
        if (!measured_.count(end_qubit)) {
            measure_out(end_qubit, std::nullopt, &rng);
        }
        recover_failure(end_qubit);
    }

    /// Entangling fusion on chain ends. `outcome` forces a label; otherwise
    /// outcomes are sampled from `rng` with the gates' probabilities.
    FuseResult fuse(const std::vector<std::size_t> &qubits, FuseVariant variant,
                    std::optional<std::string> outcome = std::nullopt, Rng *rng = nullptr) {
        const std::size_t need = variant == FuseVariant::Parity2 ? 2 : 3;
        if (qubits.size() != need) {
            throw std::invalid_argument("wrong number of qubits for fusion variant");
        }
        if (outcome) {
            auto labels = fuse_outcome_labels(variant);
            if (std::find(labels.begin(), labels.end(), *outcome) == labels.end()) {
                throw std::invalid_argument("outcome label not valid for fusion variant: " + *outcome);
            }
        } else if (rng == nullptr) {
            throw std::invalid_argument("sampled fusion needs an Rng");
        }
        FuseResult res;
        for (std::size_t i = 0; i < qubits.size(); i++) {
            std::size_t q = qubits[i];
            if (q >= qubit_count() || measured_.count(q)) {
                throw std::invalid_argument("fusion qubit is out of range or already measured");
            }
            if (graph_.degree(q) > 1) {
                res.warnings.push_back("qubit " + std::to_string(q) + " is not a chain end");
            }
            for (std::size_t j = i + 1; j < qubits.size(); j++) {
                std::size_t r = qubits[j];
                if (q == r || graph_.has_edge(q, r)) {
                    throw std::invalid_argument("fusion qubits must be distinct and non-adjacent");
                }
                for (std::size_t w : graph_.neighbors(q)) {
                    if (graph_.has_edge(w, r)) {
                        throw std::invalid_argument("fusion qubits must not share neighbours");
                    }
                }
            }
        }
        const std::size_t n = qubit_count();
        auto zz = [&](std::size_t a, std::size_t b) {
            PauliString p(n);
            p.zs[a] = 1;
            p.zs[b] = 1;
            return p;
        };
        auto meas = [&](const PauliString &p, std::optional<int> forced) {
            auto m = tableau_.measure(p, forced, rng);
            res.probability *= m.probability;
            return m.outcome;
        };
        auto want = [&](const std::string &label, int if_match, int otherwise) -> std::optional<int> {
            if (!outcome) {
                return std::nullopt;
            }
            return *outcome == label ? if_match : otherwise;
        };

        if (variant == FuseVariant::Parity2) {
            const std::size_t a = qubits[0], b = qubits[1];
            std::optional<int> forced_parity;
            if (outcome) {
                forced_parity = (*outcome == "odd") ? -1 : +1;
            }
            int parity = meas(zz(a, b), forced_parity);
            bool even_success = outcome && *outcome == "even";
            if (parity == -1 || even_success) {
                res.label = parity == -1 ? "odd" : "even";
                res.success = true;
                if (parity == -1) {
                    tableau_.x(b);
                }
                tableau_.h(b);
                absorb(a, b);
            } else {
                int za = meas(PauliString::single(n, a, 'Z'), want("product-00", +1, -1));
                res.label = za == 1 ? "product-00" : "product-11";
                measured_.insert(a);
                measured_.insert(b);
                res.measured = {a, b};
            }
        } else {
            const std::size_t a = qubits[0], b = qubits[1], c = qubits[2];
            std::optional<int> f_ab;
            if (outcome) {
                f_ab = (*outcome == "bell-q3-0" || *outcome == "bell-q3-1") ? -1 : +1;
            }
            int p_ab = meas(zz(a, b), f_ab);
            if (p_ab == -1) {
                int zc = meas(PauliString::single(n, c, 'Z'), want("bell-q3-0", +1, -1));
                res.label = zc == 1 ? "bell-q3-0" : "bell-q3-1";
                res.success = true;
                tableau_.x(b);
                tableau_.h(b);
                absorb(a, b);
                measured_.insert(c);
                res.measured = {c};
            } else {
                int p_bc = meas(zz(b, c), want("ghz", +1, -1));
                if (p_bc == 1) {
                    res.label = "ghz";
                    res.success = true;
                    tableau_.h(b);
                    absorb(a, b);
                    tableau_.h(c);
                    absorb(a, c);
                } else {
                    int za = meas(PauliString::single(n, a, 'Z'), want("product-001", +1, -1));
                    res.label = za == 1 ? "product-001" : "product-110";
                    measured_.insert(a);
                    measured_.insert(b);
                    measured_.insert(c);
                    res.measured = {a, b, c};
                }
            }
        }
        auto frame = frame_corrections();
        if (!frame) {
            throw std::logic_error("fusion result does not match the expected graph");
        }
        res.corrections = *frame;
        return res;
    }

    /// Applies the current Z frame so the tableau equals the expected graph state.
    void apply_frame() {
        auto frame = frame_corrections();
        if (!frame) {
            throw std::logic_error("state is not a graph state up to a Z frame");
        }
        // Frame indices refer to the active view; map back to tableau indices.
        std::vector<std::size_t> active;
        for (std::size_t q = 0; q < qubit_count(); q++) {
            if (!measured_.count(q)) {
                active.push_back(q);
            }
        }
        for (const auto &c : *frame) {
            tableau_.z(active[c.qubit]);
        }
    }

   private:
    /// Graph update for a parity projection on (a, b) followed by H on b:
    /// b's neighbours move to a and b becomes a leaf of a.
    void absorb(std::size_t a, std::size_t b) {
        for (std::size_t w : graph_.neighbors(b)) {
            graph_.remove_edge(b, w);
            graph_.add_edge(a, w);
        }
        graph_.add_edge(a, b);
    }

    StabilizerTableau tableau_;
    GraphSpec graph_;
    std::set<std::size_t> measured_;
};

}  // namespace qubus
