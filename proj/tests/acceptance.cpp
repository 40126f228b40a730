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


// Acceptance gate. Runs the named config of each criterion from configs/acceptance and prints
// one PASS/FAIL line per criterion. Each config is first held to pinned minimum parameters, so
// weakening a config cannot turn a criterion green.
//
//   acceptance            all criteria
//   acceptance 4 6 12     a subset

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>

#include "miesim/experiments.hpp"

using namespace miesim;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    int id;
    std::string title;
    std::string config;
    std::function<void(const Config &, std::vector<std::string> &)> pinned;
};

void need(std::vector<std::string> &errs, bool ok, const std::string &msg) {
    if (!ok) errs.push_back(msg);
}

bool list_has(const Config &c, const std::string &s, const std::string &k, const std::string &v) {
    if (!c.has(s, k)) return false;
    auto l = c.str_list(s, k);
    return std::find(l.begin(), l.end(), v) != l.end();
}

std::vector<Criterion> criteria() {
    return {
        {1, "purity scan: pure at low depth, mixed plateau at depth 6..8", "c01-fig2.cfg",
         [](const Config &c, auto &e) {
             need(e, c.str("mie-scan", "architecture") == "brickwork", "architecture must be brickwork");
             need(e, c.u64("mie-scan", "trials") == 1040, "trials must be 1040");
             need(e, c.u64_list("mie-scan", "depths") == std::vector<std::uint64_t>{1, 2, 3, 4, 5, 6, 7, 8}, "depths must be 1..8");
             need(e, c.u64_list("mie-scan", "grids") == std::vector<std::uint64_t>{9, 11, 13, 15, 17, 19, 21, 23, 25},
                  "grids must be the odd sides 9..25");
             need(e, c.str("mie-scan", "geometry", "boundary") == "boundary", "geometry must be boundary");
             need(e, c.str("mie-scan", "check") == "fig2", "check must be fig2");
         }},
        {2, "purity 1 iff S nonempty, zero exceptions", "c02-lemma1.cfg",
         [](const Config &c, auto &e) {
             need(e, c.u64("lemma1", "instances") >= 1000, "instances >= 1000");
             need(e, c.u64("lemma1", "repetitions") >= 5, "repetitions >= 5");
             std::set<std::string> kinds;
             for (const auto &t : c.str_list("lemma1", "architectures")) kinds.insert(t.substr(0, t.find('/')));
             need(e, kinds == std::set<std::string>{"brickwork", "coarse", "compiled"}, "all three architectures");
         }},
        {3, "purity <= 1/2 + (1/2) sqrt(3 E|S|) + 3 sigma", "c03-theorem3.cfg",
         [](const Config &c, auto &e) {
             need(e, c.u64("theorem3", "trials") >= 10000, "trials >= 10^4");
             for (const char *a : {"coarse/2/4", "coarse/2/8"}) need(e, list_has(c, "theorem3", "architectures", a), a);
             std::set<std::size_t> depths;
             for (const auto &t : c.str_list("theorem3", "architectures"))
                 if (t.rfind("brickwork/", 0) == 0) depths.insert(detail::parse_arch_token(t).depth);
             need(e, depths.count(2) && depths.count(4) && depths.count(6), "brickwork depths 2, 4, 6");
         }},
        {4, "two-design chi = 1/5 exactly, Monte Carlo within 3 sigma", "c04-two-design.cfg",
         [](const Config &c, auto &e) {
             need(e, list_has(c, "chi", "modes", "two-design"), "mode two-design");
             need(e, c.u64("chi", "trials") >= 100000, "trials >= 10^5");
         }},
        {5, "chi depth lower bound (1/3)(2/5)^d - 3 sigma, n = 36", "c05-depth-bound.cfg",
         [](const Config &c, auto &e) {
             need(e, list_has(c, "chi", "modes", "depth-bound"), "mode depth-bound");
             need(e, c.u64("chi", "rows") * c.u64("chi", "cols") == 36, "n = 36");
             need(e, c.u64_list("chi", "depths") == std::vector<std::uint64_t>{1, 2, 3}, "depths 1..3");
             need(e, c.u64("chi", "trials") >= 100000, "trials >= 10^5");
         }},
        {6, "worked cluster: size 11, perimeter 19", "c06-fig5.cfg",
         [](const Config &c, auto &e) {
             need(e, c.u64("cluster-checks", "expect_size") == 11, "expected size pinned to 11");
             need(e, c.u64("cluster-checks", "expect_perimeter") == 19, "expected perimeter pinned to 19");
             need(e, c.str_list("cluster-checks", "cells").size() == 11, "11 cells listed");
         }},
        {7, "Z-type bounds: t = 2 exact, t = 4 Monte Carlo, single-cell m = 2 tau = 2", "c07-ztype.cfg",
         [](const Config &c, auto &e) {
             for (const char *m : {"appendix-b-exact", "appendix-b", "single-cell"})
                 need(e, list_has(c, "cluster-checks", "modes", m), std::string("mode ") + m);
             need(e, list_has(c, "cluster-checks", "t", "4"), "t = 4");
             need(e, c.u64("cluster-checks", "trials") >= 1000000, "trials >= 10^6");
             need(e, c.str("cluster-checks", "architecture") == "coarse/2/2", "architecture coarse/2/2");
         }},
        {8, "S nonempty in <= 3 of 200 trials, m = 2, tau = 32, |C| >= 100", "c08-expected-s.cfg",
         [](const Config &c, auto &e) {
             need(e, list_has(c, "cluster-checks", "modes", "expected-s"), "mode expected-s");
             need(e, c.str("cluster-checks", "architecture") == "coarse/2/32", "architecture coarse/2/32");
             need(e, c.u64("cluster-checks", "trials") == 200, "trials = 200");
         }},
        {9, "GHZ-type frequency >= 0.005 - 3 sigma, m = 2, tau = 32", "c09-ghz.cfg",
         [](const Config &c, auto &e) {
             need(e, c.str("ghz-scan", "architecture") == "coarse/2/32", "architecture coarse/2/32");
             need(e, c.u64("ghz-scan", "trials") >= 2000, "trials >= 2000");
             need(e, c.str("ghz-scan", "check") == "ghz-probability", "check ghz-probability");
         }},
        {10, "connected graphs: every outcome string GHZ-type", "c10-lemma6.cfg",
         [](const Config &c, auto &e) {
             need(e, c.u64("lemma6", "graphs") >= 100, "graphs >= 100");
             need(e, c.u64("lemma6", "min_vertices") == 3 && c.u64("lemma6", "max_vertices") == 8, "vertices 3..8");
         }},
        {11, "gate-by-gate sampler: exactness, identity, TVD bound, schedule", "c11-gbg.cfg",
         [](const Config &c, auto &e) {
             for (const char *m : {"exactness", "purity-identity", "tvd", "schedule"})
                 need(e, list_has(c, "gbg", "modes", m), std::string("mode ") + m);
             need(e, c.u64("gbg", "circuits") >= 20, "circuits >= 20");
             need(e, c.u64("gbg", "tvd_circuits") >= 10, "tvd_circuits >= 10");
             need(e, list_has(c, "gbg", "sizes", "1") && list_has(c, "gbg", "sizes", "3"), "L in {1, 3}");
             need(e, c.str("gbg", "schedule_grid") == "12x12", "schedule grid 12x12");
         }},
        {12, "local functions on GHZ3 fail with rate >= 1/27", "c12-advantage.cfg",
         [](const Config &c, auto &e) { need(e, c.u64("advantage", "rotations") >= 20, "rotations >= 20"); }},
        {13, "tableau and dense engines agree", "c13-engines.cfg",
         [](const Config &c, auto &e) {
             need(e, c.u64("engine-equivalence", "circuits") >= 500, "circuits >= 500");
             need(e, c.u64("engine-equivalence", "max_qubits") <= 10, "n <= 10");
         }},
    };
}

}  // namespace

int main(int argc, char **argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    fs::path cfg_dir = fs::path(MIESIM_SOURCE_DIR) / "configs" / "acceptance";
    fs::path out_dir = fs::current_path() / "acceptance_out";
    int failed = 0;
    for (const auto &c : criteria()) {
        if (!only.empty() && !only.count(c.id)) continue;
        std::string line;
        bool pass = false;
        try {
            Config cfg = Config::load((cfg_dir / c.config).string());
            std::vector<std::string> errs;
            c.pinned(cfg, errs);
            if (!errs.empty()) {
                line = "config below pinned minimum: " + errs.front();
            } else {
                RunOptions opts;
                opts.out_dir = out_dir.string();
                auto r = run_experiment(cfg, opts);
                pass = r.all_pass() && !r.checks.empty();
                std::size_t ok = 0;
                std::string first_fail;
                for (const auto &ch : r.checks) {
                    ok += ch.pass;
                    if (!ch.pass && first_fail.empty()) first_fail = ch.name + ": " + ch.detail;
                }
                line = std::to_string(ok) + "/" + std::to_string(r.checks.size()) + " checks";
                if (!first_fail.empty()) line += "; first failure " + first_fail;
                line += "; " + std::to_string(static_cast<long>(r.wall_seconds)) + " s";
            }
        } catch (const std::exception &e) {
            line = std::string("error: ") + e.what();
        }
        failed += !pass;
        std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.title << "): " << line << std::endl;
    }
    return failed ? 1 : 0;
}
