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


#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>

#include "miesim/experiments.hpp"
#include "miesim/svg.hpp"

using namespace miesim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path &p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string &name) {
    fs::path p = fs::temp_directory_path() / ("miesim-test-" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::size_t count_of(const std::string &hay, const std::string &needle) {
    std::size_t n = 0;
    for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
    return n;
}

const char *kSmallScan = R"(# small scan
[experiment]
name = scan
kind = mie-scan
seed = 99

[mie-scan]
architecture = brickwork
depths = 1..8
grids = 5, 7
trials = 24
)";

int run_cli(const std::string &args, const std::string &env = "") {
    std::string cmd = env + (env.empty() ? "" : " ") + MIESIM_CLI_PATH + " " + args + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("config parsing: sections, comments, lists and ranges") {
    auto cfg = Config::parse(
        "# top\n[experiment]\nkind = chi   # trailing\nseed=5\n\n[chi]\ndepths = 1..3, 7\nmodes = two-design , depth-bound\n");
    CHECK(cfg.str("experiment", "kind") == "chi");
    CHECK(cfg.u64("experiment", "seed") == 5);
    CHECK(cfg.u64_list("chi", "depths") == std::vector<std::uint64_t>{1, 2, 3, 7});
    CHECK(cfg.str_list("chi", "modes") == std::vector<std::string>{"two-design", "depth-bound"});
    CHECK(cfg.u64("chi", "trials", 17) == 17);
    CHECK(cfg.flag("chi", "missing", true));
}

TEST_CASE("config errors carry line and column") {
    auto expect = [](const std::string &text, std::size_t line, std::size_t col, const std::string &needle) {
        try {
            auto cfg = Config::parse(text);
            validate_config(cfg);
            FAIL("no error for: " << text);
        } catch (const ConfigError &e) {
            INFO(e.what());
            CHECK(e.line() == line);
            CHECK(e.column() == col);
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect("[experiment]\nkind = chi\nseed = 1\n[chi]\nmodes = two-design\n  trails = 10\n", 6, 3, "unknown key 'trails'");
    expect("[experiment]\nkind = nope\nseed = 1\n", 2, 1, "unknown experiment kind 'nope'");
    expect("[experiment]\nkind = chi\nkind = chi\n", 3, 1, "duplicate key 'kind'");
    expect("seed = 1\n", 1, 1, "outside any section");
    expect("[experiment\n", 1, 1, "unterminated");
    expect("[experiment]\nkind = chi\nseed = 1\n[bogus]\nx = 1\n", 5, 1, "unknown section [bogus]");
    expect("[experiment]\nkind = chi\nseed = abc\n[chi]\nmodes = two-design\n", 3, 1, "non-negative integer");
    expect("[experiment]\n  kind\n", 2, 3, "expected 'key = value'");
    CHECK_THROWS_WITH(validate_config(Config::parse("[experiment]\nkind = chi\n[chi]\nmodes = two-design\n")),
                      Catch::Matchers::ContainsSubstring("seed"));
}

TEST_CASE("kind-specific parameters are validated") {
    auto run_text = [](const std::string &text) {
        RunOptions o;
        o.out_dir = scratch("validate").string();
        o.workers = 1;
        return run_experiment(Config::parse(text), o);
    };
    std::string head = "[experiment]\nseed = 1\n";
    CHECK_THROWS_WITH(run_text(head + "kind = mie-scan\n[mie-scan]\narchitecture = brickwork\ndepths = 1\ngrids = 5\n"),
                      Catch::Matchers::ContainsSubstring("trials"));
    CHECK_THROWS_WITH(run_text(head + "kind = mie-scan\n[mie-scan]\narchitecture = hex\ntrials = 2\n"),
                      Catch::Matchers::ContainsSubstring("unknown architecture"));
    CHECK_THROWS_WITH(run_text(head + "kind = ghz-scan\n[ghz-scan]\narchitecture = coarse/2\ntrials = 2\n"),
                      Catch::Matchers::ContainsSubstring("bad architecture"));
    CHECK_THROWS_WITH(run_text(head + "kind = chi\n[chi]\nmodes = fast\ntrials = 2\n"),
                      Catch::Matchers::ContainsSubstring("unknown mode 'fast'"));
    CHECK_THROWS_WITH(run_text(head + "kind = gbg\n[gbg]\nmodes = schedule\nschedule_grid = 12by12\ndepth = 2\nsizes = 1\n"),
                      Catch::Matchers::ContainsSubstring("ROWSxCOLS"));
}

TEST_CASE("architecture tokens") {
    auto b = detail::parse_arch_token("brickwork/9/11/4");
    CHECK(b.kind == "brickwork");
    CHECK(b.rows == 9);
    CHECK(b.cols == 11);
    CHECK(b.depth == 4);
    auto c = detail::parse_arch_token("compiled/2/4/30");
    CHECK(c.snake_depth == 30);
    CHECK(detail::parse_arch_token("coarse/2/8").label() == "coarse(m=2,tau=8)");
    CHECK_THROWS(detail::parse_arch_token("coarse/2/x"));
    CHECK_THROWS(detail::parse_arch_token("brickwork/9/9"));
}

TEST_CASE("mie-scan emits one row per (depth, grid) and is deterministic") {
    auto cfg = Config::parse(kSmallScan);
    RunOptions o1{1, scratch("scan1").string()}, o2{1, scratch("scan2").string()}, o3{3, scratch("scan3").string()};
    auto r1 = run_experiment(cfg, o1);
    auto r2 = run_experiment(cfg, o2);
    auto r3 = run_experiment(cfg, o3);
    std::string a = slurp(fs::path(o1.out_dir) / "scan.csv");
    CHECK(a == slurp(fs::path(o2.out_dir) / "scan.csv"));
    CHECK(a == slurp(fs::path(o3.out_dir) / "scan.csv"));
    std::istringstream is(a);
    auto table = read_csv(is);
    CHECK(table.header == scan_csv_schema());
    REQUIRE(table.rows.size() == 16);
    std::set<std::pair<std::string, std::string>> keys;
    for (const auto &row : table.rows) keys.insert({row[1], row[3]});
    CHECK(keys.size() == 16);
    CHECK(r1.checks.empty());
    CHECK(r1.all_pass());
}

TEST_CASE("manifest records config, version, timing and checks") {
    auto cfg = Config::parse("[experiment]\nname = fig5\nkind = cluster-checks\nseed = 3\n[cluster-checks]\nmodes = fig5\n"
                             "side = 3\ncells = 0:0, 0:1, 1:1\nexpect_size = 3\nexpect_perimeter = 5\n");
    auto dir = scratch("manifest");
    auto r = run_experiment(cfg, {1, dir.string()});
    auto m = nlohmann::json::parse(slurp(dir / "fig5.manifest.json"));
    CHECK(m["kind"] == "cluster-checks");
    CHECK(m["version"] == kVersion);
    CHECK(m["config"]["cluster-checks"]["cells"] == "0:0, 0:1, 1:1");
    CHECK(m["wall_time_seconds"].get<double>() >= 0);
    REQUIRE(m["checks"].size() == 1);
    CHECK(m["checks"][0]["name"] == "fig5");
    CHECK(m["checks"][0]["pass"] == true);
    CHECK(m["all_pass"] == true);
    CHECK(r.manifest == m);
}

TEST_CASE("failing checks are reported, not thrown") {
    auto cfg = Config::parse("[experiment]\nname = f\nkind = cluster-checks\nseed = 3\n[cluster-checks]\nmodes = fig5\n"
                             "side = 3\ncells = 0:0\nexpect_size = 2\nexpect_perimeter = 4\n");
    auto r = run_experiment(cfg, {1, scratch("fail").string()});
    REQUIRE(r.checks.size() == 1);
    CHECK_FALSE(r.all_pass());
}

TEST_CASE("svg plot: one curve per depth with error bars") {
    auto dir = scratch("plot");
    run_experiment(Config::parse(kSmallScan), {1, dir.string()});
    auto table = load_csv((dir / "scan.csv").string());
    auto svg = plot_svg(table, "mie-scan");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(count_of(svg, "class=\"curve\"") == 8);
    CHECK(count_of(svg, "class=\"legend\"") == 8);
    CHECK(count_of(svg, "class=\"errorbar\"") == 16);
    CHECK(count_of(svg, "<polyline") == 8);
    CHECK(svg.find("d = 8") != std::string::npos);
    CHECK(svg.find("href") == std::string::npos);  // no external resources
}

TEST_CASE("svg plot: single row, empty and mismatched CSVs") {
    std::istringstream one("arch,param,L,grid,trials,mean_purity,stderr,seed\nbrickwork,3,7,9x9,10,0.9,0.01,1\n");
    auto svg = plot_svg(read_csv(one), "mie-scan");
    CHECK(count_of(svg, "<circle") == 1);
    CHECK(count_of(svg, "<polyline") == 0);

    std::istringstream empty("");
    CHECK_THROWS_WITH(read_csv(empty), Catch::Matchers::ContainsSubstring("empty"));
    std::istringstream header_only("arch,param,L,grid,trials,mean_purity,stderr,seed\n");
    CHECK_THROWS(plot_svg(read_csv(header_only), "mie-scan"));
    std::istringstream wrong("check,param,value\nx,1,2\n");
    CHECK_THROWS_WITH(plot_svg(read_csv(wrong), "mie-scan"), Catch::Matchers::ContainsSubstring("schema"));
    std::istringstream ragged("arch,param\nbrickwork\n");
    CHECK_THROWS(read_csv(ragged));
    std::istringstream ok("arch,param,L,grid,trials,mean_purity,stderr,seed\nbrickwork,3,7,9x9,10,0.9,0.01,1\n");
    CHECK_THROWS(plot_svg(read_csv(ok), "histogram"));
}

TEST_CASE("nice ticks") {
    auto t = detail::nice_ticks(0.47, 1.02);
    REQUIRE(!t.empty());
    CHECK(t.front() >= 0.47);
    CHECK(t.back() <= 1.02);
    CHECK(t.size() >= 3);
    CHECK(t.size() <= 12);
}

TEST_CASE("every shipped config validates") {
    std::size_t n = 0;
    for (const auto &sub : {"configs/acceptance", "configs/experiments"}) {
        for (const auto &e : fs::directory_iterator(fs::path(MIESIM_SOURCE_DIR) / sub)) {
            if (e.path().extension() != ".cfg") continue;
            INFO(e.path());
            CHECK_NOTHROW(validate_config(Config::load(e.path().string())));
            ++n;
        }
    }
    CHECK(n >= 13);
}

TEST_CASE("CLI exit codes and thread override") {
    auto dir = scratch("cli");
    auto cfg = dir / "scan.cfg";
    std::ofstream(cfg) << kSmallScan;
    CHECK(run_cli("run " + cfg.string() + " --out " + (dir / "a").string(), "MIESIM_THREADS=1") == 0);
    CHECK(run_cli("run " + cfg.string() + " --out " + (dir / "b").string(), "MIESIM_THREADS=4") == 0);
    CHECK(slurp(dir / "a" / "scan.csv") == slurp(dir / "b" / "scan.csv"));

    auto failing = dir / "fail.cfg";
    std::ofstream(failing) << "[experiment]\nname = f\nkind = ghz-scan\nseed = 1\n[ghz-scan]\n"
                              "architecture = brickwork/3/3/1\ntrials = 20\ncheck = ghz-probability\n";
    CHECK(run_cli("run " + failing.string() + " --out " + dir.string()) == 1);

    auto bad = dir / "bad.cfg";
    std::ofstream(bad) << "[experiment]\nkind = chi\nseed = 1\nbogus = 2\n";
    CHECK(run_cli("run " + bad.string()) == 2);
    CHECK(run_cli("run") == 2);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("run " + (dir / "missing.cfg").string()) == 2);

    CHECK(run_cli("plot " + (dir / "a" / "scan.csv").string() + " --kind mie-scan -o " + (dir / "p.svg").string()) == 0);
    CHECK(slurp(dir / "p.svg").find("<svg") == 0);
    CHECK(run_cli("plot " + (dir / "a" / "scan.csv").string() + " --kind pie -o " + (dir / "q.svg").string()) == 2);
    auto empty = dir / "empty.csv";
    std::ofstream(empty).close();
    CHECK(run_cli("plot " + empty.string() + " --kind mie-scan -o " + (dir / "e.svg").string()) == 2);

    std::string gbg = std::string(MIESIM_SOURCE_DIR) + "/configs/experiments/bell-2x2.gbg";
    CHECK(run_cli("validate " + gbg) == 0);
    auto broken = dir / "broken.txt";
    std::ofstream(broken) << "QUBITS 4 GRID 2 2\nGATE 0 0 1 | zz\n";
    CHECK(run_cli("validate " + broken.string()) == 1);
    CHECK(run_cli("validate " + (dir / "nope.txt").string()) == 2);
}
