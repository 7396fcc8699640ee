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

// Flat-file emitters: CSV, JSON lines and minimal SVG line plots.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <stdexcept>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qubus/growth.hpp"

namespace qubus::io {

using Json = nlohmann::ordered_json;

inline std::string fmt(double x, int digits = 10) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

inline std::string csv_cell(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

class Csv {
   public:
    explicit Csv(std::vector<std::string> header) : width_(header.size()) { row(header); }

    void row(const std::vector<std::string> &cells) {
        if (cells.size() != width_) {
            throw std::invalid_argument("csv row width mismatch");
        }
        for (std::size_t i = 0; i < cells.size(); i++) {
            if (i) {
                out_ << ',';
            }
            out_ << csv_cell(cells[i]);
        }
        out_ << '\n';
    }

    std::string str() const { return out_.str(); }

   private:
    std::size_t width_;
    std::ostringstream out_;
};

/// Configuration fields that determine results. Thread count is excluded.
inline Json config_json(const StrategyConfig &c) {
    Json j;
    j["variant"] = strategy_name(c.variant);
    j["p"] = c.p;
    j["gate_time"] = c.gate_time;
    j["target_L"] = c.target_L;
    if (c.rounds_k) {
        j["rounds_k"] = *c.rounds_k;
    }
    j["initial_qubits"] = c.initial_qubits;
    j["trials"] = c.trials;
    j["master_seed"] = c.master_seed;
    j["max_ops"] = c.max_ops;
    j["floor"] = c.floor == SequentialFloor::Reseed ? "reseed" : "unbounded";
    if (c.L0) {
        j["L0"] = *c.L0;
    }
    return j;
}

inline std::string growth_jsonl(const GrowthStats &s) {
    std::string out;
    const Json cfg = config_json(s.config);
    for (const auto &r : s.trials) {
        Json j;
        j["trial"] = r.index;
        j["seed"] = r.seed;
        j["ops"] = r.ops;
        j["time"] = r.time;
        j["consumed"] = r.consumed;
        j["wasted"] = r.wasted;
        j["final_length"] = r.final_length;
        if (r.capped) {
            j["capped"] = true;
        }
        if (!r.chains.empty()) {
            j["chains"] = r.chains;
        }
        j["config"] = cfg;
        out += j.dump() + "\n";
    }
    return out;
}

inline double nominal_length(const StrategyConfig &c) {
    if (c.variant == Strategy::DivideConquer) {
        return dc_length(*c.rounds_k);
    }
    if (c.variant == Strategy::VerticalLink) {
        return 0;
    }
    return static_cast<double>(c.target_L);
}

/// Aggregate row: variant,p,L,trials,mean_ops,ci_ops,mean_time,ci_time,mean_wasted,analytic_ops,z_score.
inline std::string growth_csv(const GrowthStats &s, const std::vector<ComparisonRow> &cmp) {
    Csv csv({"variant", "p", "L", "trials", "mean_ops", "ci_ops", "mean_time", "ci_time", "mean_wasted",
             "analytic_ops", "z_score"});
    std::string analytic, z;
    for (const auto &r : cmp) {
        if (r.metric == "ops") {
            analytic = fmt(r.analytic);
            z = fmt(r.z, 6);
            break;
        }
    }
    csv.row({strategy_name(s.config.variant), fmt(s.config.p), fmt(nominal_length(s.config)),
             std::to_string(s.config.trials), fmt(s.ops.mean), fmt(s.ops.ci95), fmt(s.time.mean), fmt(s.time.ci95),
             fmt(s.wasted.mean), analytic, z});
    return csv.str();
}

inline std::string comparison_csv(const std::vector<ComparisonRow> &cmp) {
    Csv csv({"metric", "law", "empirical", "stderr", "analytic", "z", "relative", "status"});
    for (const auto &r : cmp) {
        csv.row({r.metric, r.law, fmt(r.empirical), fmt(r.stderr_, 6), fmt(r.analytic), fmt(r.z, 6),
                 fmt(r.relative, 6), r.pass ? "pass" : "flag"});
    }
    return csv.str();
}

struct SeriesPoint {
    double L = 0;
    std::string series;
    std::string quantity;  // "N" or "T"
    double value = 0;
};

inline std::string scaling_csv(const std::vector<SeriesPoint> &pts) {
    Csv csv({"L", "series", "quantity", "value"});
    for (const auto &p : pts) {
        csv.row({fmt(p.L), p.series, p.quantity, fmt(p.value)});
    }
    return csv.str();
}

/// SVG 1.1 line plot of (L, value) per series. Non-finite or (for log scale)
/// non-positive values are skipped.
inline std::string svg_plot(const std::vector<SeriesPoint> &pts, const std::string &title, bool log_y) {
    const double W = 720, H = 480, left = 70, right = 180, top = 40, bottom = 50;
    std::map<std::string, std::vector<std::pair<double, double>>> series;
    std::vector<std::string> order;
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto &p : pts) {
        double y = log_y ? (p.value > 0 ? std::log10(p.value) : NAN) : p.value;
        if (!std::isfinite(y) || !std::isfinite(p.L)) {
            continue;
        }
        if (!series.count(p.series)) {
            order.push_back(p.series);
        }
        series[p.series].emplace_back(p.L, y);
        xmin = std::min(xmin, p.L);
        xmax = std::max(xmax, p.L);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }
    if (order.empty()) {
        xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    }
    if (xmax == xmin) {
        xmax = xmin + 1;
    }
    if (ymax == ymin) {
        ymax = ymin + 1;
    }
    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (W - left - right); };
    auto sy = [&](double y) { return H - bottom - (y - ymin) / (ymax - ymin) * (H - top - bottom); };
    static const char *colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};
    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
    o << "<line x1=\"" << left << "\" y1=\"" << H - bottom << "\" x2=\"" << W - right << "\" y2=\"" << H - bottom
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << H - bottom
      << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; i++) {
        double xv = xmin + (xmax - xmin) * i / 4, yv = ymin + (ymax - ymin) * i / 4;
        o << "<text x=\"" << sx(xv) << "\" y=\"" << H - bottom + 18 << "\" text-anchor=\"middle\">" << fmt(xv, 4)
          << "</text>\n";
        o << "<text x=\"" << left - 6 << "\" y=\"" << sy(yv) + 4 << "\" text-anchor=\"end\">"
          << (log_y ? "1e" + fmt(yv, 3) : fmt(yv, 4)) << "</text>\n";
    }
    o << "<text x=\"" << (left + W - right) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">L</text>\n";
    for (std::size_t k = 0; k < order.size(); k++) {
        const char *c = colors[k % (sizeof colors / sizeof *colors)];
        o << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
        for (const auto &[x, y] : series[order[k]]) {
            o << fmt(sx(x), 6) << "," << fmt(sy(y), 6) << " ";
        }
        o << "\"/>\n";
        double ly = top + 16 * static_cast<double>(k);
        o << "<line x1=\"" << W - right + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - right + 30 << "\" y2=\"" << ly
          << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n"
          << "<text x=\"" << W - right + 35 << "\" y=\"" << ly + 4 << "\">" << order[k] << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

inline const std::vector<std::string> &known_series() {
    static const std::vector<std::string> names = {
        "dc", "merge", "seq", "rus-pf-0.6", "rus-pf-0.4", "linear-optics-p-half", "merge-16L-50", "merge-8L-44/3"};
    return names;
}

/// Value of `series` at length L for quantity "N" (operations) or "T" (time, t = 1).
/// NaN outside the series' domain.
inline double series_value(const std::string &series, const std::string &quantity, double L, double p) {
    const bool ops = quantity == "N";
    if (!ops && quantity != "T") {
        throw std::invalid_argument("quantity must be N or T");
    }
    try {
        if (series == "dc") {
            return ops ? ndc_continuous(L, p) : 1 + std::log2(L - 1);
        }
        if (series == "merge") {
            if (ops) {
                return merge_linear(L, p);
            }
            return merge_scaling(L, p, minimal_length(p)).T_closed;
        }
        if (series == "seq") {
            auto s = seq_scaling(L, p);
            return ops ? s.N : s.T;
        }
        if (series == "linear-optics-p-half" && !ops) {
            return L > 3 ? 14 + 2 * std::log2(L - 3) : NAN;
        }
        auto ref = reference_series(series);
        return ops ? ref(L) : NAN;
    } catch (const std::domain_error &) {
        return NAN;
    }
}

inline std::vector<SeriesPoint> scaling_points(const std::vector<std::string> &series,
                                               const std::vector<std::string> &quantities, double p, double L_min,
                                               double L_max, double step) {
    for (const auto &s : series) {
        if (std::find(known_series().begin(), known_series().end(), s) == known_series().end()) {
            throw std::invalid_argument("unknown series: " + s);
        }
    }
    if (!(step > 0) || L_max < L_min) {
        throw std::invalid_argument("invalid length range");
    }
    std::vector<SeriesPoint> out;
    const auto count = static_cast<long long>(std::floor((L_max - L_min) / step + 1e-9));
    for (const auto &q : quantities) {
        for (const auto &s : series) {
            for (long long i = 0; i <= count; i++) {
                double L = L_min + static_cast<double>(i) * step;
                double v = series_value(s, q, L, p);
                if (std::isfinite(v)) {
                    out.push_back({L, s, q, v});
                }
            }
        }
    }
    return out;
}

/// First L (ascending) where series `a` drops below series `b`, from a table.
inline std::optional<double> crossover(const std::vector<SeriesPoint> &pts, const std::string &a, const std::string &b,
                                       const std::string &quantity) {
    std::map<double, double> va, vb;
    for (const auto &pt : pts) {
        if (pt.quantity != quantity) {
            continue;
        }
        if (pt.series == a) {
            va[pt.L] = pt.value;
        } else if (pt.series == b) {
            vb[pt.L] = pt.value;
        }
    }
    for (const auto &[L, v] : va) {
        auto it = vb.find(L);
        if (it != vb.end() && v < it->second) {
            return L;
        }
    }
    return std::nullopt;
}

}  // namespace qubus::io
