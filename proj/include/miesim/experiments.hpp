// Copyright 2026 The miesim Authors
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


// Config-driven experiment runner. Each run writes its CSV output(s) and a JSON manifest
// holding the config echo, code version, wall time and per-check pass/fail.
//
// Every trial draws from trial_seed(master seed, tag, trial index), and results are gathered in
// trial order, so the CSV bytes do not depend on the worker count.

#ifndef MIESIM_EXPERIMENTS_HPP
#define MIESIM_EXPERIMENTS_HPP

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "miesim/advantage.hpp"
#include "miesim/cluster.hpp"
#include "miesim/config.hpp"
#include "miesim/dense.hpp"
#include "miesim/gate_by_gate.hpp"
#include "miesim/ghz.hpp"
#include "miesim/mie.hpp"
#include "miesim/svg.hpp"

namespace miesim {

inline constexpr const char *kVersion = "0.1.0";

/// Pass thresholds used by the built-in checks.
namespace tolerance {
inline constexpr double kSigmas = 3.0;
inline constexpr double kFig2PureMin = 0.99;      // d <= 4, largest grid
inline constexpr double kFig2MixedMax = 0.95;     // d in {6, 7, 8}, every grid >= 13
inline constexpr std::size_t kFig2PureMaxDepth = 4;
inline constexpr std::size_t kFig2MixedMinDepth = 6;
inline constexpr std::size_t kFig2MixedMaxDepth = 8;
inline constexpr std::size_t kFig2MinGrid = 13;
inline constexpr double kGhzProbability = 0.005;
inline constexpr std::size_t kExpectedSMaxNonempty = 3;
inline constexpr std::size_t kExpectedSMinBoundary = 100;
inline constexpr double kGbgExact = 1e-9;  // L1 distance
inline constexpr std::size_t kScheduleMaxGroups = 9;
}  // namespace tolerance

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct RunOptions {
    std::size_t workers = 0;  // 0: MIESIM_THREADS or hardware concurrency
    std::string out_dir = ".";
};

struct RunResult {
    std::string name, kind;
    std::vector<CheckResult> checks;
    std::vector<std::string> outputs;
    std::map<std::string, std::string> csv;  // file name -> contents
    double wall_seconds = 0;
    nlohmann::json manifest;

    bool all_pass() const {
        for (const auto &c : checks)
            if (!c.pass) return false;
        return true;
    }
};

inline const std::vector<std::string> &experiment_kinds() {
    static const std::vector<std::string> k = {"mie-scan", "ghz-scan", "chi",      "cluster-checks", "gbg",
                                               "advantage", "lemma1",  "theorem3", "lemma6",         "engine-equivalence"};
    return k;
}

namespace detail {

inline const std::map<std::string, std::set<std::string>> &kind_keys() {
    static const std::map<std::string, std::set<std::string>> k = {
        {"mie-scan", {"architecture", "depths", "grids", "m", "taus", "snake_depth", "geometry", "sizes", "trials", "check"}},
        {"ghz-scan", {"architecture", "trials", "check"}},
        {"chi", {"modes", "trials", "rows", "cols", "depths"}},
        {"cluster-checks",
         {"modes", "side", "cells", "expect_size", "expect_perimeter", "t", "trials", "architecture", "random_per_cell",
          "shield"}},
        {"gbg",
         {"modes", "circuits", "grid", "depth", "tvd_circuits", "tvd_grid", "tvd_depth", "sizes", "samples", "schedule_grid", "circuit",
          "L", "backend"}},
        {"advantage", {"rotations"}},
        {"lemma1", {"architectures", "instances", "repetitions"}},
        {"theorem3", {"architectures", "trials"}},
        {"lemma6", {"graphs", "min_vertices", "max_vertices"}},
        {"engine-equivalence", {"circuits", "max_qubits"}},
    };
    return k;
}

inline ConfigError config_error(const Config &cfg, const std::string &sec, const std::string &key, const std::string &msg) {
    if (cfg.has(sec, key)) {
        const auto &v = cfg.value(sec, key);
        return ConfigError(v.line, v.col, msg);
    }
    return ConfigError(0, 0, msg);
}

/// "brickwork/R/C/d", "coarse/m/tau" or "compiled/m/tau[/snake_depth]".
inline ArchitectureSpec parse_arch_token(const std::string &tok) {
    std::vector<std::string> parts;
    std::stringstream ss(tok);
    for (std::string p; std::getline(ss, p, '/');) parts.push_back(p);
    auto num = [&](std::size_t i) {
        const auto &p = parts.at(i);
        if (p.empty() || p.find_first_not_of("0123456789") != std::string::npos) {
            throw std::invalid_argument("bad number '" + p + "' in architecture '" + tok + "'");
        }
        return static_cast<std::size_t>(std::stoull(p));
    };
    ArchitectureSpec a;
    if (parts.empty()) throw std::invalid_argument("empty architecture");
    a.kind = parts[0];
    if (a.kind == "brickwork" && parts.size() == 4) {
        a.rows = num(1), a.cols = num(2), a.depth = num(3);
    } else if (a.kind == "coarse" && parts.size() == 3) {
        a.m = num(1), a.tau = num(2);
    } else if (a.kind == "compiled" && (parts.size() == 3 || parts.size() == 4)) {
        a.m = num(1), a.tau = num(2);
        if (parts.size() == 4) a.snake_depth = num(3);
    } else {
        throw std::invalid_argument("bad architecture '" + tok +
                                    "' (expected brickwork/R/C/d, coarse/m/tau or compiled/m/tau[/snake])");
    }
    a.build();  // validates parameters
    return a;
}

inline ArchitectureSpec arch_value(const Config &cfg, const std::string &sec, const std::string &key) {
    try {
        return parse_arch_token(cfg.str(sec, key));
    } catch (const std::invalid_argument &e) {
        throw config_error(cfg, sec, key, e.what());
    }
}

inline GridGeometry grid_value(const Config &cfg, const std::string &sec, const std::string &key) {
    std::string s = cfg.str(sec, key);
    auto x = s.find('x');
    try {
        if (x == std::string::npos) throw std::invalid_argument("");
        std::size_t pr = 0, pc = 0;
        std::size_t r = std::stoull(s.substr(0, x), &pr), c = std::stoull(s.substr(x + 1), &pc);
        if (pr != x || pc != s.size() - x - 1 || r == 0 || c == 0) throw std::invalid_argument("");
        return {r, c};
    } catch (const std::exception &) {
        throw config_error(cfg, sec, key, "'" + key + "' expects ROWSxCOLS, got '" + s + "'");
    }
}

inline std::size_t positive(const Config &cfg, const std::string &sec, const std::string &key) {
    auto v = cfg.u64(sec, key);
    if (v == 0) throw config_error(cfg, sec, key, "'" + key + "' must be positive");
    return static_cast<std::size_t>(v);
}

inline std::vector<std::string> modes_of(const Config &cfg, const std::string &sec, const std::set<std::string> &allowed) {
    auto modes = cfg.str_list(sec, "modes");
    for (const auto &m : modes) {
        if (!allowed.count(m)) throw config_error(cfg, sec, "modes", "unknown mode '" + m + "'");
    }
    return modes;
}

inline std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

/// Rows of the shared check,param,value,stderr,bound,trials,seed schema.
class CheckCsv {
   public:
    CheckCsv() { os_ << "check,param,value,stderr,bound,trials,seed\n"; }
    void row(const std::string &check, const std::string &param, double value, double se, double bound,
             std::size_t trials, std::uint64_t seed) {
        os_ << check << ',' << param << ',' << num(value) << ',' << num(se) << ',' << num(bound) << ',' << trials << ','
            << seed << '\n';
    }
    std::string str() const { return os_.str(); }

   private:
    std::ostringstream os_;
};

struct Context {
    const Config &cfg;
    std::string sec;
    std::uint64_t seed;
    std::size_t workers;
    RunResult &out;
    std::string name;

    void check(const std::string &check, bool pass, const std::string &detail) { out.checks.push_back({check, pass, detail}); }
    void csv(const std::string &suffix, const std::string &text) { out.csv[name + suffix] = text; }
};

// ---- mie-scan --------------------------------------------------------------------------------

inline void fig2_checks(Context &cx, const std::vector<MieScanRow> &rows) {
    using namespace tolerance;
    std::map<std::size_t, std::vector<const MieScanRow *>> by_depth;
    for (const auto &r : rows) by_depth[r.d_or_tau].push_back(&r);
    auto side = [](const MieScanRow *r) { return static_cast<std::size_t>(std::stoull(r->grid.substr(0, r->grid.find('x')))); };
    for (auto &[d, pts] : by_depth) {
        std::sort(pts.begin(), pts.end(), [&](auto a, auto b) { return side(a) < side(b); });
        const MieScanRow *last = pts.back();
        if (d <= kFig2PureMaxDepth) {
            cx.check("fig2/pure/d=" + std::to_string(d), last->mean_purity >= kFig2PureMin,
                     "purity " + num(last->mean_purity) + " at " + last->grid + ", need >= " + num(kFig2PureMin));
        } else if (d >= kFig2MixedMinDepth && d <= kFig2MixedMaxDepth) {
            bool below = true;
            std::string worst;
            for (auto *p : pts) {
                if (side(p) >= kFig2MinGrid && p->mean_purity > kFig2MixedMax) below = false, worst = p->grid;
            }
            cx.check("fig2/mixed/d=" + std::to_string(d), below,
                     below ? "purity <= " + num(kFig2MixedMax) + " on every grid >= 13" : "purity above bound at " + worst);
            if (pts.size() >= 2) {
                const MieScanRow *prev = pts[pts.size() - 2];
                double diff = std::abs(last->mean_purity - prev->mean_purity);
                double sig = std::hypot(last->se, prev->se);
                cx.check("fig2/plateau/d=" + std::to_string(d), diff < kSigmas * sig,
                         "|" + num(last->mean_purity) + " - " + num(prev->mean_purity) + "| = " + num(diff) + " vs 3 sigma " +
                             num(kSigmas * sig));
            }
        }
    }
}

inline void run_mie_scan(Context &cx) {
    const auto &cfg = cx.cfg;
    const auto &s = cx.sec;
    MieScanSpec spec;
    spec.arch.kind = cfg.str(s, "architecture");
    spec.trials = positive(cfg, s, "trials");
    spec.seed = cx.seed;
    std::string geom = cfg.str(s, "geometry", "boundary");
    if (geom == "boundary") {
        spec.geometry = ScanGeometry::Boundary;
    } else if (geom == "square") {
        spec.geometry = ScanGeometry::Square;
        for (auto L : cfg.u64_list(s, "sizes")) {
            if (L % 2 == 0) throw config_error(cfg, s, "sizes", "shield sides must be odd");
            spec.Ls.push_back(L);
        }
    } else {
        throw config_error(cfg, s, "geometry", "geometry must be 'boundary' or 'square'");
    }
    if (spec.arch.kind == "brickwork") {
        for (auto d : cfg.u64_list(s, "depths")) spec.params.push_back(d);
        for (auto g : cfg.u64_list(s, "grids")) {
            if (g < 3) throw config_error(cfg, s, "grids", "grid sides must be >= 3");
            spec.grids.push_back(g);
        }
        if (spec.geometry == ScanGeometry::Square) {
            if (spec.grids.size() != 1) throw config_error(cfg, s, "grids", "square geometry takes one grid side");
            spec.arch.rows = spec.arch.cols = spec.grids[0];
        }
    } else if (spec.arch.kind == "coarse" || spec.arch.kind == "compiled") {
        spec.arch.m = positive(cfg, s, "m");
        spec.arch.snake_depth = cfg.u64(s, "snake_depth", 0);
        for (auto t : cfg.u64_list(s, "taus")) spec.params.push_back(t);
        for (auto t : spec.params) {
            try {
                check_coarse(spec.arch.m, t);
            } catch (const std::invalid_argument &e) {
                throw config_error(cfg, s, "taus", e.what());
            }
        }
    } else {
        throw config_error(cfg, s, "architecture", "unknown architecture '" + spec.arch.kind + "'");
    }
    auto rows = mie_scan(spec, cx.workers);
    std::ostringstream os;
    for (std::size_t i = 0; i < scan_csv_schema().size(); ++i) os << (i ? "," : "") << scan_csv_schema()[i];
    os << '\n';
    for (const auto &r : rows) {
        os << r.arch << ',' << r.d_or_tau << ',' << r.L << ',' << r.grid << ',' << r.trials << ',' << num(r.mean_purity) << ','
           << num(r.se) << ',' << r.seed << '\n';
    }
    cx.csv(".csv", os.str());
    std::string check = cfg.str(s, "check", "none");
    if (check == "fig2") {
        if (spec.arch.kind != "brickwork") throw config_error(cfg, s, "check", "fig2 check needs brickwork");
        fig2_checks(cx, rows);
    } else if (check != "none") {
        throw config_error(cfg, s, "check", "check must be 'fig2' or 'none'");
    }
}

// ---- ghz-scan --------------------------------------------------------------------------------

inline void run_ghz_scan(Context &cx) {
    auto arch = arch_value(cx.cfg, cx.sec, "architecture");
    auto r = ghz_scan(arch, positive(cx.cfg, cx.sec, "trials"), cx.seed, SamplerPolicy::Uniform, cx.workers);
    CheckCsv csv;
    csv.row("ghz-rate", r.arch, r.rate.mean, r.rate.se, tolerance::kGhzProbability, r.trials, r.seed);
    cx.csv(".csv", csv.str());
    std::string check = cx.cfg.str(cx.sec, "check", "none");
    if (check == "ghz-probability") {
        double thr = tolerance::kGhzProbability - tolerance::kSigmas * r.rate.se;
        cx.check("ghz-probability", r.rate.mean >= thr,
                 std::to_string(r.hits) + "/" + std::to_string(r.trials) + " = " + num(r.rate.mean) + ", need >= 0.005 - 3 sigma = " +
                     num(thr));
    } else if (check != "none") {
        throw config_error(cx.cfg, cx.sec, "check", "check must be 'ghz-probability' or 'none'");
    }
}

// ---- chi -------------------------------------------------------------------------------------

inline void run_chi(Context &cx) {
    CheckCsv csv;
    std::size_t trials = positive(cx.cfg, cx.sec, "trials");
    for (const auto &mode : modes_of(cx.cfg, cx.sec, {"two-design", "depth-bound"})) {
        if (mode == "two-design") {
            auto ex = two_design_chi_exhaustive();
            csv.row("two-design-exhaustive", "group=" + std::to_string(ex.group_size), ex.chi(), 0, 0.2,
                    static_cast<std::size_t>(ex.group_size), cx.seed);
            cx.check("two-design/exhaustive", ex.equals_one_fifth(),
                     "4 sum P^2 = " + std::to_string(ex.four_sum) + " over " + std::to_string(ex.group_size) + ", chi = " + num(ex.chi()));
            CircuitTemplate one;
            one.grid = {1, 2};
            one.depth = 1;
            one.slots = {{0, {0, 1}}};
            auto mc = chi_estimate(one, {0}, trials, cx.seed, SamplerPolicy::Uniform, cx.workers);
            double haar = chi_haar(1, 2);
            csv.row("two-design-mc", "ab=1", mc.chi, mc.se, haar, trials, cx.seed);
            cx.check("two-design/mc", std::abs(mc.chi - haar) <= tolerance::kSigmas * mc.se,
                     "chi = " + num(mc.chi) + " +- " + num(mc.se) + " vs " + num(haar));
        } else {
            std::size_t rows = positive(cx.cfg, cx.sec, "rows"), cols = positive(cx.cfg, cx.sec, "cols");
            std::vector<std::size_t> depths;
            for (auto d : cx.cfg.u64_list(cx.sec, "depths")) depths.push_back(d);
            for (const auto &r : chi_depth_lower_bound_check(rows, cols, depths, trials, cx.seed, cx.workers)) {
                csv.row("depth-bound", "d=" + std::to_string(r.depth), r.estimate.mean, r.estimate.se, r.bound, trials, cx.seed);
                cx.check("depth-bound/d=" + std::to_string(r.depth), r.pass,
                         num(r.estimate.mean) + " +- " + num(r.estimate.se) + " vs (1/3)(2/5)^d = " + num(r.bound));
            }
        }
    }
    cx.csv(".csv", csv.str());
}

// ---- cluster-checks --------------------------------------------------------------------------

inline std::vector<std::pair<std::size_t, std::size_t>> parse_cells(const Config &cfg, const std::string &sec) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto &item : cfg.str_list(sec, "cells")) {
        auto colon = item.find(':');
        try {
            if (colon == std::string::npos) throw std::invalid_argument("");
            std::size_t p1 = 0, p2 = 0;
            std::size_t r = std::stoull(item.substr(0, colon), &p1), c = std::stoull(item.substr(colon + 1), &p2);
            if (p1 != colon || p2 != item.size() - colon - 1) throw std::invalid_argument("");
            out.push_back({r, c});
        } catch (const std::exception &) {
            throw config_error(cfg, sec, "cells", "cells expects row:col items, got '" + item + "'");
        }
    }
    return out;
}

inline void run_cluster_checks(Context &cx) {
    const auto &cfg = cx.cfg;
    const auto &s = cx.sec;
    CheckCsv csv;
    auto modes = modes_of(cfg, s, {"fig5", "appendix-b-exact", "appendix-b", "single-cell", "expected-s"});
    for (const auto &mode : modes) {
        if (mode == "fig5") {
            std::size_t side = positive(cfg, s, "side");
            Cluster c(side);
            try {
                c = Cluster::from_cells(side, parse_cells(cfg, s));
            } catch (const std::out_of_range &e) {
                throw config_error(cfg, s, "cells", e.what());
            }
            auto st = stats_of(c);
            std::size_t ea = cfg.u64(s, "expect_size"), el = cfg.u64(s, "expect_perimeter");
            csv.row("fig5-size", "side=" + std::to_string(side), static_cast<double>(st.size), 0, static_cast<double>(ea), 1, cx.seed);
            csv.row("fig5-perimeter", "side=" + std::to_string(side), static_cast<double>(st.perimeter), 0,
                    static_cast<double>(el), 1, cx.seed);
            cx.check("fig5", st.size == ea && st.perimeter == el,
                     "size " + std::to_string(st.size) + ", perimeter " + std::to_string(st.perimeter) + "; expected " +
                         std::to_string(ea) + ", " + std::to_string(el));
        } else if (mode == "appendix-b-exact" || mode == "appendix-b") {
            std::vector<AppendixBRow> rows;
            if (mode == "appendix-b-exact") {
                rows = appendix_b_exact_t2(cx.seed);
            } else {
                std::size_t trials = positive(cfg, s, "trials");
                for (auto t : cfg.u64_list(s, "t")) {
                    if (t < 2 || t > 8 || t % 2) throw config_error(cfg, s, "t", "t must be even in [2, 8]");
                    auto r = appendix_b_lemma_checks(t, trials, cx.seed, cx.workers);
                    rows.insert(rows.end(), r.begin(), r.end());
                }
            }
            for (const auto &r : rows) {
                std::string p = "t=" + std::to_string(r.t) + ";k=" + std::to_string(r.k);
                csv.row("appendix-b/" + r.check, p, r.estimate.mean, r.estimate.se, r.bound, r.estimate.n, r.seed);
                cx.check("appendix-b/" + r.check + "/" + p, r.pass(),
                         num(r.estimate.mean) + (r.exact ? " (exact)" : " +- " + num(r.estimate.se)) + " vs bound " + num(r.bound));
            }
        } else if (mode == "single-cell") {
            auto arch = arch_value(cfg, s, "architecture");
            if (arch.kind == "brickwork") throw config_error(cfg, s, "architecture", "single-cell needs coarse or compiled");
            std::size_t trials = positive(cfg, s, "trials");
            auto pats = single_cell_patterns(arch.m, arch.tau, cfg.u64(s, "random_per_cell", 2), cx.seed);
            std::ostringstream zcsv;
            write_cluster_csv_header(zcsv);
            std::size_t fails = 0, checked = 0;
            for (std::size_t i = 0; i < pats.size(); ++i) {
                auto r = ztype_probability_mc(pats[i], arch, trials, trial_seed(cx.seed, "single-cell", i), cx.workers);
                r.check = "single-cell-" + std::to_string(i);
                write_cluster_csv_row(zcsv, r);
                if (!r.informational()) ++checked;
                fails += !r.pass();
            }
            cx.csv(".ztype.csv", zcsv.str());
            cx.check("single-cell", fails == 0 && checked > 0,
                     std::to_string(checked) + " patterns with bound < 1, " + std::to_string(fails) + " above bound + 3 sigma");
        } else {
            auto arch = arch_value(cfg, s, "architecture");
            if (arch.kind != "coarse") throw config_error(cfg, s, "architecture", "expected-s needs the coarse architecture");
            std::size_t L = positive(cfg, s, "shield");
            if (L % 2 == 0) throw config_error(cfg, s, "shield", "shield side must be odd");
            auto tmpl = arch.build();
            auto part = square_tripartition(tmpl.grid, grid_center(tmpl.grid), L);
            std::size_t trials = positive(cfg, s, "trials");
            auto r = expected_S_bound_mc(arch, part, trials, cx.seed, SamplerPolicy::Uniform, cx.workers);
            csv.row("expected-s/mean-size", r.arch, r.mean_size.mean, r.mean_size.se, r.bound, trials, cx.seed);
            csv.row("expected-s/nonempty", r.arch, static_cast<double>(r.nonempty), 0,
                    static_cast<double>(tolerance::kExpectedSMaxNonempty), trials, cx.seed);
            for (auto [l, v] : r.perimeter_hist) {
                csv.row("expected-s/perimeter", "l=" + std::to_string(l), v, 0, l ? lemma4_bound(l, r.m, r.tau) : 0, trials, cx.seed);
            }
            cx.check("expected-s/boundary", r.c_size >= tolerance::kExpectedSMinBoundary,
                     "|C| = " + std::to_string(r.c_size) + ", need >= 100");
            cx.check("expected-s/nonempty", r.nonempty <= tolerance::kExpectedSMaxNonempty,
                     std::to_string(r.nonempty) + " of " + std::to_string(trials) + " trials with S nonempty; bound " + num(r.bound) +
                         ", Markov count " + num(r.markov_count_limit()));
        }
    }
    cx.csv(".csv", csv.str());
}

// ---- gbg -------------------------------------------------------------------------------------

inline void run_gbg_kind(Context &cx) {
    const auto &cfg = cx.cfg;
    const auto &s = cx.sec;
    CheckCsv csv;
    auto modes = modes_of(cfg, s, {"exactness", "purity-identity", "tvd", "schedule", "sample"});
    for (const auto &mode : modes) {
        if (mode == "exactness" || mode == "purity-identity") {
            std::size_t circuits = positive(cfg, s, "circuits"), depth = positive(cfg, s, "depth");
            auto g = grid_value(cfg, s, "grid");
            if (g.num_qubits() > 8) throw config_error(cfg, s, "grid", "exactness and identity checks use n <= 8");
            double worst = 0;
            for (std::size_t i = 0; i < circuits; ++i) {
                Rng rng = trial_rng(cx.seed, "gbg/" + mode, i);
                auto c = random_gbg_circuit(g.rows, g.cols, depth, false, rng);
                double v = 0;
                if (mode == "exactness") {
                    GbgConfig gc;
                    gc.exact_conditionals = true;
                    auto pt = GbgSampler(c, gc).output_distribution();
                    v = 2 * total_variation(pt, run_gbg_dense(c, c.gates.size()).probabilities());
                } else {
                    std::size_t n = g.num_qubits();
                    Tripartition part;
                    part.A = {static_cast<std::size_t>(uniform_below(rng, n))};
                    for (std::size_t q = 0; q < n; ++q) {
                        if (q != part.A[0]) (uniform_below(rng, 2) ? part.B : part.C).push_back(q);
                    }
                    auto r = purity_fidelity_identity_check(c, uniform_below(rng, c.gates.size() + 1), part);
                    v = std::abs(r.fidelity - r.purity);
                }
                csv.row("gbg/" + mode, "circuit=" + std::to_string(i), v, 0, mode == "exactness" ? tolerance::kGbgExact : 1e-8, 1,
                        cx.seed);
                worst = std::max(worst, v);
            }
            double tol = mode == "exactness" ? tolerance::kGbgExact : 1e-8;
            cx.check("gbg/" + mode, worst <= tol,
                     std::to_string(circuits) + " circuits, worst " + num(worst) + " vs " + num(tol));
        } else if (mode == "tvd") {
            std::size_t circuits = positive(cfg, s, "tvd_circuits");
            std::size_t depth = cfg.has(s, "tvd_depth") ? positive(cfg, s, "tvd_depth") : positive(cfg, s, "depth");
            std::size_t samples = positive(cfg, s, "samples");
            auto g = grid_value(cfg, s, "tvd_grid");
            if (g.num_qubits() > 12) throw config_error(cfg, s, "tvd_grid", "tvd check uses n <= 12");
            auto Ls = cfg.u64_list(s, "sizes");
            std::size_t fails = 0;
            for (std::size_t i = 0; i < circuits; ++i) {
                Rng rng = trial_rng(cx.seed, "gbg/tvd", i);
                auto c = random_gbg_circuit(g.rows, g.cols, depth, false, rng);
                std::size_t L = Ls[i % Ls.size()];
                auto r = tvd_bound_check(c, L, samples, trial_seed(cx.seed, "gbg/tvd/samples", i), cx.workers);
                std::string p = "circuit=" + std::to_string(i) + ";L=" + std::to_string(L);
                csv.row("gbg/tvd-exact", p, r.lhs_exact, 0, r.rhs, samples, cx.seed);
                csv.row("gbg/tvd-empirical", p, r.lhs_empirical, r.sigma, r.rhs + r.bias, samples, cx.seed);
                fails += !r.pass();
            }
            cx.check("gbg/tvd", fails == 0, std::to_string(circuits) + " circuits, " + std::to_string(fails) + " failures");
        } else if (mode == "schedule") {
            auto g = grid_value(cfg, s, "schedule_grid");
            std::size_t depth = positive(cfg, s, "depth");
            Rng rng = trial_rng(cx.seed, "gbg/schedule", 0);
            auto c = random_gbg_circuit(g.rows, g.cols, depth, false, rng);
            bool ok = true;
            std::string detail;
            for (auto L : cfg.u64_list(s, "sizes")) {
                auto sch = plan_parallel_schedule(c, L);
                auto errs = validate_schedule(c, sch);
                csv.row("gbg/schedule", "L=" + std::to_string(L), static_cast<double>(sch.max_groups()), 0,
                        static_cast<double>(tolerance::kScheduleMaxGroups), sch.layers.size(), cx.seed);
                ok = ok && errs.empty() && sch.max_groups() <= tolerance::kScheduleMaxGroups;
                detail += (detail.empty() ? "" : "; ") + ("L=" + std::to_string(L) + ": " + std::to_string(sch.layers.size()) +
                                                          " layers, max " + std::to_string(sch.max_groups()) + " groups, " +
                                                          std::to_string(errs.size()) + " errors");
            }
            cx.check("gbg/schedule", ok, detail);
        } else {
            std::string path = cfg.str(s, "circuit");
            std::ifstream f(path);
            if (!f) throw config_error(cfg, s, "circuit", "cannot open circuit file " + path);
            GbgCircuit c = parse_gbg_circuit(f);
            GbgConfig gc;
            gc.L = cfg.u64(s, "L", 1);
            std::string backend = cfg.str(s, "backend", "dense");
            if (backend == "clifford") {
                gc.backend = GbgBackend::CliffordExact;
            } else if (backend != "dense") {
                throw config_error(cfg, s, "backend", "backend must be 'dense' or 'clifford'");
            }
            GbgSampler sampler(c, gc);
            auto xs = sample_gbg(sampler, positive(cfg, s, "samples"), cx.seed, cx.workers);
            std::ostringstream os;
            write_samples(os, xs);
            cx.csv(".samples.csv", os.str());
        }
    }
    cx.csv(".csv", csv.str());
}

// ---- remaining kinds -------------------------------------------------------------------------

inline void run_advantage(Context &cx) {
    std::size_t rotations = cx.cfg.u64(cx.sec, "rotations", 0);
    std::ostringstream os;
    std::size_t fails = 0, witnessed = 0, worst = 27;
    auto one = [&](const std::string &label, const StabilizerTableau &psi, bool header) {
        auto r = exhaustive_minimum_failure(psi);
        write_advantage_csv(os, label, r, header);
        worst = std::min(worst, r.min_failures);
        fails += r.min_failures < 1 || r.functions != 512;
    };
    one("ghz3", ghz3_state(), true);
    for (std::size_t i = 0; i < rotations; ++i) {
        Rng rng = trial_rng(cx.seed, "advantage/rotation", i);
        std::array<CliffordGate, 3> u{sample_uniform_clifford(1, rng), sample_uniform_clifford(1, rng),
                                      sample_uniform_clifford(1, rng)};
        auto psi = apply_local(ghz3_state(), u);
        witnessed += ghz_witness(psi).has_value();
        one("ghz3-rot" + std::to_string(i), psi, false);
    }
    cx.csv(".csv", os.str());
    cx.check("advantage/min-failure", fails == 0 && witnessed == rotations,
             std::to_string(rotations + 1) + " states, minimum " + std::to_string(worst) + "/27 (need >= 1/27), " +
                 std::to_string(witnessed) + " rotations witnessed");
}

inline std::vector<ArchitectureSpec> arch_list(const Config &cfg, const std::string &sec) {
    std::vector<ArchitectureSpec> out;
    for (const auto &tok : cfg.str_list(sec, "architectures")) {
        try {
            out.push_back(parse_arch_token(tok));
        } catch (const std::invalid_argument &e) {
            throw config_error(cfg, sec, "architectures", e.what());
        }
    }
    return out;
}

inline void run_lemma1(Context &cx) {
    auto archs = arch_list(cx.cfg, cx.sec);
    for (const auto &a : archs) {
        if (a.build().num_qubits() > 400) throw config_error(cx.cfg, cx.sec, "architectures", a.label() + " has more than 400 qubits");
    }
    auto r = lemma1_check(archs, positive(cx.cfg, cx.sec, "instances"), positive(cx.cfg, cx.sec, "repetitions"), cx.seed,
                          cx.workers);
    CheckCsv csv;
    csv.row("lemma1/exceptions", "instances=" + std::to_string(r.instances), static_cast<double>(r.exceptions), 0, 0,
            r.measurements, cx.seed);
    csv.row("lemma1/nonempty", "instances=" + std::to_string(r.instances), static_cast<double>(r.nonempty), 0, 0, r.instances,
            cx.seed);
    cx.csv(".csv", csv.str());
    cx.check("lemma1", r.pass(),
             std::to_string(r.instances) + " instances, " + std::to_string(r.measurements) + " measurements, " +
                 std::to_string(r.exceptions) + " exceptions (" + std::to_string(r.nonempty) + " with S nonempty)");
}

inline void run_theorem3(Context &cx) {
    std::size_t trials = positive(cx.cfg, cx.sec, "trials");
    CheckCsv csv;
    for (const auto &a : arch_list(cx.cfg, cx.sec)) {
        auto tmpl = a.build();
        auto part = boundary_tripartition(tmpl.grid);
        auto r = theorem3_bound_check(tmpl, part, trials, trial_seed(cx.seed, a.label(), 0), SamplerPolicy::Uniform, cx.workers);
        csv.row("theorem3/lhs", a.label(), r.lhs.mean, r.lhs.se, r.rhs, trials, cx.seed);
        csv.row("theorem3/mean-S", a.label(), r.mean_S.mean, r.mean_S.se, 0, trials, cx.seed);
        cx.check("theorem3/" + a.label(), r.pass && r.mismatches == 0,
                 "LHS " + num(r.lhs.mean) + " +- " + num(r.lhs.se) + ", RHS " + num(r.rhs) + " +- " + num(r.rhs_se) + ", E|S| " +
                     num(r.mean_S.mean) + ", " + std::to_string(r.mismatches) + " purity/S mismatches");
    }
    cx.csv(".csv", csv.str());
}

inline void run_lemma6(Context &cx) {
    auto r = lemma6_check(positive(cx.cfg, cx.sec, "graphs"), cx.cfg.u64(cx.sec, "min_vertices", 3),
                          cx.cfg.u64(cx.sec, "max_vertices", 8), cx.seed);
    CheckCsv csv;
    csv.row("lemma6/failures", "graphs=" + std::to_string(r.graphs), static_cast<double>(r.failures), 0, 0, r.outcome_strings,
            cx.seed);
    cx.csv(".csv", csv.str());
    cx.check("lemma6", r.pass(),
             std::to_string(r.graphs) + " graphs, " + std::to_string(r.outcome_strings) + " outcome strings, " +
                 std::to_string(r.failures) + " failures");
}

inline void run_engine_equivalence(Context &cx) {
    auto r = engine_equivalence_check(positive(cx.cfg, cx.sec, "circuits"), cx.cfg.u64(cx.sec, "max_qubits", 10), cx.seed);
    CheckCsv csv;
    csv.row("engine/max-tvd", "circuits=" + std::to_string(r.circuits), r.max_tvd, 0, 1e-9, r.circuits, cx.seed);
    csv.row("engine/max-purity-diff", "circuits=" + std::to_string(r.circuits), r.max_purity_diff, 0, 1e-9, r.circuits, cx.seed);
    cx.csv(".csv", csv.str());
    cx.check("engine-equivalence", r.pass(),
             std::to_string(r.circuits) + " circuits, max TVD " + num(r.max_tvd) + ", max purity difference " +
                 num(r.max_purity_diff));
}

}  // namespace detail

/// Checks sections, keys and the master seed. Returns the experiment kind.
inline std::string validate_config(const Config &cfg) {
    const auto &kind_val = cfg.value("experiment", "kind");
    const std::string &kind = kind_val.text;
    const auto &keys = detail::kind_keys();
    if (!keys.count(kind)) throw ConfigError(kind_val.line, kind_val.col, "unknown experiment kind '" + kind + "'");
    std::map<std::string, std::set<std::string>> schema = {
        {"experiment", {"name", "kind", "seed"}},
        {"output", {"csv", "manifest"}},
        {kind, keys.at(kind)},
    };
    cfg.check_schema(schema);
    if (!cfg.has("experiment", "seed")) throw ConfigError(0, 0, "missing mandatory key 'seed' in [experiment]");
    cfg.u64("experiment", "seed");
    if (!cfg.has_section(kind)) throw ConfigError(0, 0, "missing section [" + kind + "]");
    return kind;
}

/// Runs the experiment, writing outputs under opts.out_dir.
inline RunResult run_experiment(const Config &cfg, const RunOptions &opts = {}) {
    auto t0 = std::chrono::steady_clock::now();
    std::string kind = validate_config(cfg);
    RunResult res;
    res.kind = kind;
    res.name = cfg.str("experiment", "name", kind);
    std::size_t workers = opts.workers ? opts.workers : worker_count();
    detail::Context cx{cfg, kind, cfg.u64("experiment", "seed"), workers, res, res.name};
    if (kind == "mie-scan") detail::run_mie_scan(cx);
    else if (kind == "ghz-scan") detail::run_ghz_scan(cx);
    else if (kind == "chi") detail::run_chi(cx);
    else if (kind == "cluster-checks") detail::run_cluster_checks(cx);
    else if (kind == "gbg") detail::run_gbg_kind(cx);
    else if (kind == "advantage") detail::run_advantage(cx);
    else if (kind == "lemma1") detail::run_lemma1(cx);
    else if (kind == "theorem3") detail::run_theorem3(cx);
    else if (kind == "lemma6") detail::run_lemma6(cx);
    else detail::run_engine_equivalence(cx);
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    namespace fs = std::filesystem;
    fs::path dir(opts.out_dir);
    fs::create_directories(dir);
    std::string primary = cfg.str("output", "csv", res.name + ".csv");
    for (const auto &[file, text] : res.csv) {
        fs::path p = dir / (file == res.name + ".csv" ? primary : file);
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        std::ofstream(p, std::ios::binary) << text;
        res.outputs.push_back(p.string());
    }
    nlohmann::json m;
    m["name"] = res.name;
    m["kind"] = kind;
    m["version"] = kVersion;
    m["config"] = cfg.echo();
    m["seed"] = cx.seed;
    m["workers"] = workers;
    m["wall_time_seconds"] = res.wall_seconds;
    m["outputs"] = res.outputs;
    m["checks"] = nlohmann::json::array();
    for (const auto &c : res.checks) m["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    m["all_pass"] = res.all_pass();
    res.manifest = m;
    fs::path mp = dir / cfg.str("output", "manifest", res.name + ".manifest.json");
    if (mp.has_parent_path()) fs::create_directories(mp.parent_path());
    std::ofstream(mp) << m.dump(2) << '\n';
    res.outputs.push_back(mp.string());
    return res;
}

}  // namespace miesim

#endif
