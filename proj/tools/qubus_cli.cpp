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

// qubus: gate tables, growth simulations, scaling tables and the verification suite.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qubus/expr.hpp"
#include "qubus/gates.hpp"
#include "qubus/growth.hpp"
#include "qubus/io.hpp"
#include "qubus/verify.hpp"

namespace {

using qubus::io::Json;
using qubus::io::fmt;

constexpr int kExitFail = 1;
constexpr int kExitInvalid = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
    if (const char *env = std::getenv("QUBUS_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception &) {
            throw UsageError(std::string("QUBUS_SEED is not an unsigned integer: ") + env);
        }
    }
    return 1;
}

void write_file(const std::string &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw UsageError("cannot open " + path + " for writing");
    }
    out << content;
}

/// Fills options not given on the command line from a JSON object.
/// Keys are long option names without dashes.
void apply_config(CLI::App &app, const std::string &path) {
    if (path.empty()) {
        return;
    }
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot read config " + path);
    }
    Json cfg = Json::parse(in);
    if (!cfg.is_object()) {
        throw UsageError("config must be a JSON object");
    }
    for (const auto &[key, value] : cfg.items()) {
        CLI::Option *opt = app.get_option_no_throw("--" + key);
        if (opt == nullptr) {
            throw UsageError("unknown config key '" + key + "' for " + app.get_name());
        }
        if (opt->count() > 0) {
            continue;  // command line wins
        }
        std::vector<std::string> items;
        auto as_text = [](const Json &v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
        if (value.is_array()) {
            for (const auto &v : value) {
                items.push_back(as_text(v));
            }
        } else {
            items.push_back(as_text(value));
        }
        opt->clear();
        for (const auto &s : items) {
            opt->add_result(s);
        }
        opt->run_callback();
    }
}

double number(const std::string &text, const char *what) {
    try {
        return qubus::Expression::evaluate(text);
    } catch (const std::exception &e) {
        throw UsageError(std::string(what) + ": " + e.what());
    }
}

// ---------------------------------------------------------------- gate

struct GateArgs {
    std::string name;
    std::string alpha = "1000";
    std::string theta = "0.003";
    std::string beta = "sqrt(pi/8)";
    std::string input = "plus";
    std::size_t n = 3;
    bool resolving = false;
    std::string csv;
    std::string config;
};

qubus::QubitState gate_input(const std::string &spec, std::size_t n) {
    if (spec == "plus") {
        return qubus::QubitState::plus(n);
    }
    if (spec.size() != n) {
        throw UsageError("--input must be 'plus' or a " + std::to_string(n) + "-bit pattern");
    }
    return qubus::QubitState::basis(spec);
}

std::string corrections_text(const qubus::Corrections &cs) {
    std::string out;
    for (const auto &c : cs) {
        out += (out.empty() ? "" : " ") + c.str();
    }
    return out.empty() ? "-" : out;
}

void print_table(const qubus::GateTable &t) {
    std::printf("gate: %s\n", t.gate.c_str());
    std::printf("%-16s %14s %14s %12s  %s\n", "outcome", "probability", "window_prob", "fidelity", "corrections");
    for (const auto &o : t.outcomes) {
        std::printf("%-16s %14.10g %14.10g %12.10g  %s\n", o.label.c_str(), o.probability, o.window_probability,
                    o.fidelity, corrections_text(o.corrections).c_str());
    }
    std::printf("total probability: %.15g\n", t.total_probability());
    std::printf("success probability: %.15g\n", t.success_probability());
    std::printf("gate time: %g\n", t.gate_time);
    std::printf("peak leakage: %.6g\n", t.peak_leakage);
    const auto &b = t.budget;
    std::printf("error budget: momentum %.6g position %.6g vacuum %.6g (exact overlap %.6g), alpha*theta %.6g\n",
                b.p_err_momentum, b.p_err_position, b.p_err_vacuum, b.p_err_vacuum_exact, b.separation_parameter);
    for (const auto &w : b.warnings) {
        std::printf("warning: %s\n", w.c_str());
    }
    for (const auto &w : t.warnings) {
        std::printf("warning: %s\n", w.c_str());
    }
}

std::string table_csv(const qubus::GateTable &t) {
    std::string out = "gate,outcome,probability,window_probability,fidelity,entangling,corrections\n";
    for (const auto &o : t.outcomes) {
        out += qubus::io::csv_cell(t.gate) + "," + qubus::io::csv_cell(o.label) + "," + fmt(o.probability, 15) + "," +
               fmt(o.window_probability, 17) + "," + fmt(o.fidelity, 17) + "," + (o.entangling ? "1" : "0") + "," +
               qubus::io::csv_cell(corrections_text(o.corrections)) + "\n";
    }
    return out;
}

int run_gate(const GateArgs &a) {
    const double alpha = number(a.alpha, "--alpha");
    const double theta = number(a.theta, "--theta");
    if (!(alpha > 0)) {
        throw UsageError("--alpha must be positive");
    }
    std::optional<qubus::GateTable> table;
    if (a.name == "parity-momentum") {
        table = qubus::parity_momentum_table(alpha, theta, gate_input(a.input, 2));
    } else if (a.name == "parity-position") {
        table = qubus::parity_position_table(alpha, theta, gate_input(a.input, 2));
    } else if (a.name == "parity-bucket") {
        table = qubus::parity_bucket_table(alpha, theta, gate_input(a.input, 2), a.resolving);
    } else if (a.name == "three-qubit") {
        table = qubus::three_qubit_table(alpha, theta, gate_input(a.input, 3));
    } else if (a.name == "cascade") {
        if (a.n < 2 || a.n > 12) {
            throw UsageError("--n must be in [2, 12] for cascade");
        }
        table = qubus::cascaded_table(a.n, alpha, theta);
    }
    if (table) {
        print_table(*table);
        if (!a.csv.empty()) {
            write_file(a.csv, table_csv(*table));
        }
        return 0;
    }

    const double beta = number(a.beta, "--beta");
    if (a.name == "geometric-cz") {
        auto in = gate_input(a.input, 2);
        auto r = qubus::geometric_cz(qubus::Complex(0, beta), beta, in);
        double f = r.corrected.fidelity(qubus::apply_cz(in, 0, 1));
        std::printf("coupling J: %.15g\ncontrolled phase: %.15g\nis CZ: %s\nbus spread: %.3g\n", r.coupling,
                    r.controlled_phase, r.is_cz ? "yes" : "no", r.bus_spread);
        std::printf("corrections: %s\nfidelity vs CZ: %.15g\n", corrections_text(r.corrections).c_str(), f);
        return 0;
    }
    if (a.name == "chain" || a.name == "star") {
        if (a.n < 2 || a.n > 12) {
            throw UsageError("--n must be in [2, 12]");
        }
        auto seq = a.name == "chain" ? qubus::chain_sequence(a.n, beta) : qubus::star_sequence(a.n, beta);
        auto spec = a.name == "chain" ? qubus::GraphSpec::chain(a.n) : qubus::GraphSpec::star(a.n);
        auto c = qubus::check_sequence(seq, spec);
        std::printf("qubits: %zu\ninteractions: %zu\nbus spread: %.3g\n", a.n, seq.steps.size(), c.bus_spread);
        std::printf("corrections: %s\n", c.corrections ? corrections_text(*c.corrections).c_str() : "none found");
        std::printf("stabilizer check: %s\n", c.stabilizer_pass ? "PASS" : "FAIL");
        return c.stabilizer_pass ? 0 : kExitFail;
    }
    if (a.name == "compile") {
        auto c = qubus::compile_conditional_displacement(alpha, theta, 0);
        std::printf("net conditional displacement: %.15g%+.15gi\n", c.net.real(), c.net.imag());
        std::printf("steps: %zu\nresidual phase: %.15g\ncorrections: %s\n", c.sequence.steps.size(),
                    c.residual_phase, corrections_text(c.corrections).c_str());
        return 0;
    }
    throw UsageError("unknown gate '" + a.name + "'");
}

// ---------------------------------------------------------------- growth

struct GrowthArgs {
    std::string variant;
    double p = 0.75;
    double gate_time = 1.0;
    long long L = 41;
    int k = -1;
    std::uint64_t n = 1 << 16;
    std::uint64_t trials = 1000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::uint64_t max_ops = 0;
    std::string floor = "unbounded";
    int L0 = -1;
    std::string csv, jsonl, comparison, config;
};

int run_growth(const GrowthArgs &a) {
    qubus::StrategyConfig c;
    try {
        c.variant = qubus::parse_strategy(a.variant);
    } catch (const std::exception &e) {
        throw UsageError(e.what());
    }
    c.p = a.p;
    c.gate_time = a.gate_time;
    c.target_L = a.L;
    if (a.k >= 0) {
        c.rounds_k = a.k;
    } else if (c.variant == qubus::Strategy::DivideConquer) {
        c.rounds_k = 8;
    }
    c.initial_qubits = a.n;
    c.trials = a.trials;
    c.master_seed = a.seed;
    c.threads = a.threads;
    c.max_ops = a.max_ops;
    if (a.floor == "unbounded") {
        c.floor = qubus::SequentialFloor::Unbounded;
    } else if (a.floor == "reseed") {
        c.floor = qubus::SequentialFloor::Reseed;
    } else {
        throw UsageError("--floor must be 'unbounded' or 'reseed'");
    }
    if (a.L0 >= 0) {
        c.L0 = a.L0;
    }
    try {
        c.validate();
    } catch (const std::exception &e) {
        throw UsageError(e.what());
    }
    auto stats = qubus::simulate(c);
    auto rows = qubus::compare_to_analytic(stats);
    std::string csv = qubus::io::growth_csv(stats, rows);
    if (a.csv.empty()) {
        std::cout << csv;
    } else {
        write_file(a.csv, csv);
    }
    if (!a.jsonl.empty()) {
        write_file(a.jsonl, qubus::io::growth_jsonl(stats));
    }
    std::string cmp = qubus::io::comparison_csv(rows);
    if (!a.comparison.empty()) {
        write_file(a.comparison, cmp);
    } else {
        std::cerr << cmp;
    }
    return 0;
}

// ---------------------------------------------------------------- scaling

struct ScalingArgs {
    std::vector<std::string> series{"dc", "merge", "seq"};
    std::vector<std::string> quantities{"N"};
    double p = 0.75;
    double L_min = 5, L_max = 400, step = 1;
    bool log_y = false;
    std::string csv, svg, config;
};

int run_scaling(const ScalingArgs &a) {
    for (const auto &s : a.series) {
        const auto &known = qubus::io::known_series();
        if (std::find(known.begin(), known.end(), s) == known.end()) {
            throw UsageError("unknown series '" + s + "'");
        }
    }
    for (const auto &q : a.quantities) {
        if (q != "N" && q != "T") {
            throw UsageError("quantity must be N or T");
        }
    }
    if (!(a.L_max >= a.L_min) || !(a.step > 0)) {
        throw UsageError("need Lmax >= Lmin and step > 0");
    }
    std::vector<qubus::io::SeriesPoint> pts;
    try {
        pts = qubus::io::scaling_points(a.series, a.quantities, a.p, a.L_min, a.L_max, a.step);
    } catch (const std::invalid_argument &e) {
        throw UsageError(e.what());
    }
    std::string csv = qubus::io::scaling_csv(pts);
    if (a.csv.empty()) {
        std::cout << csv;
    } else {
        write_file(a.csv, csv);
    }
    if (!a.svg.empty()) {
        char title[128];
        std::snprintf(title, sizeof title, "%s versus L at p = %g", a.quantities.front().c_str(), a.p);
        write_file(a.svg, qubus::io::svg_plot(pts, title, a.log_y));
    }
    for (const auto &q : a.quantities) {
        for (std::size_t i = 0; i < a.series.size(); i++) {
            for (std::size_t j = i + 1; j < a.series.size(); j++) {
                if (auto x = qubus::io::crossover(pts, a.series[i], a.series[j], q)) {
                    std::cerr << "crossover " << q << " " << a.series[i] << "/" << a.series[j] << " at L = " << *x
                              << "\n";
                }
            }
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"qubus: qubus gate, cluster growth and resource-scaling experiments"};
    app.require_subcommand(1);

    GateArgs gate;
    auto *g = app.add_subcommand("gate", "exhaustive outcome table for a gate protocol");
    g->add_option("name", gate.name,
                  "parity-momentum | parity-position | parity-bucket | three-qubit | cascade | geometric-cz | "
                  "chain | star | compile")
        ->required();
    g->add_option("--alpha", gate.alpha, "probe amplitude (expression)");
    g->add_option("--theta", gate.theta, "conditional rotation angle (expression)");
    g->add_option("--beta", gate.beta, "conditional displacement (expression)");
    g->add_option("--n", gate.n, "qubit count for cascade, chain and star");
    g->add_option("--input", gate.input, "'plus' or a bit pattern such as 01");
    g->add_flag("--resolving", gate.resolving, "photon-number-resolving bucket detector");
    g->add_option("--csv", gate.csv, "write the outcome table as CSV");
    g->add_option("--config", gate.config, "JSON file with option values");

    GrowthArgs growth;
    growth.seed = 0;
    auto *gr = app.add_subcommand("growth", "Monte Carlo cluster-growth strategy");
    gr->add_option("variant", growth.variant, "sequential | merge | divide_conquer | vertical_link")->required();
    gr->add_option("--p", growth.p, "fusion success probability");
    gr->add_option("--time", growth.gate_time, "time units per entangling attempt");
    gr->add_option("--L", growth.L, "target chain length");
    gr->add_option("--k", growth.k, "divide-and-conquer rounds, or sequential fixed rounds");
    gr->add_option("--n", growth.n, "initial qubits for divide-and-conquer");
    gr->add_option("--trials", growth.trials, "number of trials");
    auto *seed_opt = gr->add_option("--seed", growth.seed, "master seed (default QUBUS_SEED or 1)");
    gr->add_option("--threads", growth.threads, "worker threads; output does not depend on it");
    gr->add_option("--max-ops", growth.max_ops, "per-trial cap on attempts, 0 = none");
    gr->add_option("--floor", growth.floor, "sequential length-one failure rule: unbounded | reseed");
    gr->add_option("--L0", growth.L0, "merge piece length");
    gr->add_option("--csv", growth.csv, "aggregate CSV path (default stdout)");
    gr->add_option("--jsonl", growth.jsonl, "per-trial JSONL path");
    gr->add_option("--comparison", growth.comparison, "analytic comparison CSV path (default stderr)");
    gr->add_option("--config", growth.config, "JSON file with option values");

    ScalingArgs scaling;
    auto *sc = app.add_subcommand("scaling", "analytic resource-scaling tables");
    sc->add_option("--series", scaling.series, "series names")->delimiter(',');
    sc->add_option("--quantity", scaling.quantities, "N (operations) and/or T (time)")->delimiter(',');
    sc->add_option("--p", scaling.p, "fusion success probability");
    sc->add_option("--Lmin", scaling.L_min, "smallest length");
    sc->add_option("--Lmax", scaling.L_max, "largest length");
    sc->add_option("--step", scaling.step, "length step");
    sc->add_flag("--log", scaling.log_y, "logarithmic y axis in the SVG");
    sc->add_option("--csv", scaling.csv, "CSV path (default stdout)");
    sc->add_option("--svg", scaling.svg, "SVG plot path");
    sc->add_option("--config", scaling.config, "JSON file with option values");

    qubus::verify::Options vopt;
    bool verbose = false;
    auto *vf = app.add_subcommand("verify", "run the cross-verification suite");
    vf->add_flag("--quick", vopt.quick, "reduced trial counts and looser tolerances");
    vf->add_flag("--verbose", verbose, "show every check");
    vf->add_option("--threads", vopt.threads, "worker threads for Monte Carlo criteria");
    auto *vseed = vf->add_option("--seed", vopt.seed, "master seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? 0 : kExitInvalid;
    }

    try {
        if (g->parsed()) {
            apply_config(*g, gate.config);
            return run_gate(gate);
        }
        if (gr->parsed()) {
            apply_config(*gr, growth.config);
            if (seed_opt->count() == 0) {
                growth.seed = default_seed();
            }
            return run_growth(growth);
        }
        if (sc->parsed()) {
            apply_config(*sc, scaling.config);
            return run_scaling(scaling);
        }
        if (vf->parsed()) {
            if (vseed->count() == 0 && std::getenv("QUBUS_SEED") != nullptr) {
                vopt.seed = default_seed();
            }
            auto results = qubus::verify::run_all(vopt);
            std::cout << qubus::verify::report(results, verbose);
            for (const auto &r : results) {
                if (r.status == qubus::verify::Status::Fail) {
                    return kExitFail;
                }
            }
            return 0;
        }
    } catch (const UsageError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::domain_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const nlohmann::json::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    }
    return 0;
}
