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

// Direct numerical integration of Gaussian tails, independent of erfc.

#pragma once

#include <cmath>
#include <numbers>

namespace qubus::oracle {

/// Integral of the unit-variance normal density centred at `mean` over
/// [lo, lo + span], by composite Simpson with `intervals` panels (even).
inline double normal_mass_simpson(double mean, double lo, double span = 40.0, int intervals = 200000) {
    const double h = span / intervals;
    auto f = [&](double x) { return std::exp(-0.5 * (x - mean) * (x - mean)) / std::sqrt(2 * std::numbers::pi); };
    double s = f(lo) + f(lo + span);
    for (int i = 1; i < intervals; i++) {
        s += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return s * h / 3.0;
}

/// Mass of N(mean, 1) below `hi`, integrated over [hi - span, hi].
inline double normal_lower_mass(double mean, double hi, double span = 40.0) {
    return normal_mass_simpson(mean, hi - span, span);
}

}  // namespace qubus::oracle
