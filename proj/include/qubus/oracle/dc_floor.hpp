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

// Exact expectation of divide-and-conquer chain counts when an unpaired
// chain is discarded each round: C[j+1] ~ Binomial(floor(C[j] / 2), p).

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace qubus::oracle {

inline std::vector<double> binomial_pmf(std::uint64_t m, double p) {
    std::vector<double> pmf(m + 1, 0.0);
    if (p >= 1) {
        pmf[m] = 1;
        return pmf;
    }
    const double lp = std::log(p), lq = std::log1p(-p);
    const double lm = std::lgamma(static_cast<double>(m) + 1);
    for (std::uint64_t x = 0; x <= m; x++) {
        double xs = static_cast<double>(x);
        pmf[x] = std::exp(lm - std::lgamma(xs + 1) - std::lgamma(static_cast<double>(m - x) + 1) + xs * lp +
                          static_cast<double>(m - x) * lq);
    }
    return pmf;
}

/// E[C[j]] for j = 0..k starting from n single qubits.
inline std::vector<double> dc_floor_expectation(std::uint64_t n, double p, int k, double cutoff = 1e-18) {
    std::vector<double> dist(n + 1, 0.0);
    dist[n] = 1;
    std::vector<double> mean{static_cast<double>(n)};
    for (int j = 1; j <= k; j++) {
        std::vector<double> next(dist.size() / 2 + 1, 0.0);
        for (std::uint64_t c = 0; c < dist.size(); c++) {
            if (dist[c] < cutoff) {
                continue;
            }
            auto pmf = binomial_pmf(c / 2, p);
            for (std::uint64_t x = 0; x < pmf.size(); x++) {
                next[x] += dist[c] * pmf[x];
            }
        }
        dist.swap(next);
        double e = 0;
        for (std::uint64_t c = 0; c < dist.size(); c++) {
            e += static_cast<double>(c) * dist[c];
        }
        mean.push_back(e);
    }
    return mean;
}

}  // namespace qubus::oracle
