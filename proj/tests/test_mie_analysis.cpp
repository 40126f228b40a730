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

#include "miesim/mie.hpp"

using namespace miesim;

namespace {

CliffordCircuit ghz3(bool hadamard_on_middle) {
    auto c = empty_circuit(1, 3);
    append_gate(c, CliffordGate::named("H"), {0});
    append_gate(c, CliffordGate::named("CNOT"), {0, 1});
    append_gate(c, CliffordGate::named("CNOT"), {1, 2});
    if (hadamard_on_middle) append_gate(c, CliffordGate::named("H"), {1});
    return c;
}

// Brute-force S: enumerate every s, conjugate Z(s) forward and classify the image.
std::array<std::size_t, 3> brute_force_S(const CliffordCircuit &c, const Tripartition &part) {
    std::size_t n = c.num_qubits();
    std::array<std::size_t, 3> counts{0, 0, 0};
    std::vector<char> where(n, 'C');
    for (auto q : part.A) where[q] = 'A';
    for (auto q : part.B) where[q] = 'B';
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
        PauliString z(n);
        for (std::size_t q = 0; q < n; ++q) z.zs.set(q, (s >> q) & 1);
        auto img = conjugate_pauli(c, z, Direction::Forward);
        bool ok = true;
        for (std::size_t q = 0; q < n && ok; ++q) {
            char ch = img.get(q);
            if (where[q] == 'B' && (ch == 'X' || ch == 'Y')) ok = false;
            if (where[q] == 'C' && ch != 'I') ok = false;
        }
        if (!ok) continue;
        char pa = img.get(part.A[0]);
        if (pa == 'X') ++counts[0];
        if (pa == 'Y') ++counts[1];
        if (pa == 'Z') ++counts[2];
    }
    return counts;
}

}  // namespace

TEST_CASE("square tripartition sizes", "[tripartition]") {
    GridGeometry g{9, 9};
    auto t = square_tripartition(g, grid_center(g), 7);
    REQUIRE(t.A.size() == 1);
    REQUIRE(t.B.size() == 48);
    REQUIRE(t.C.size() == 32);
    t.validate(81);
    auto t1 = square_tripartition(g, grid_center(g), 1);
    REQUIRE(t1.B.empty());
    REQUIRE(t1.C.size() == 80);
    REQUIRE(square_tripartition(g, grid_center(g), 19).C.empty());
    REQUIRE_THROWS(square_tripartition(g, 0, 4));
    REQUIRE_THROWS(square_tripartition(g, 81, 3));
    // Clipped at the corner: a 3x3 square around (0,0) keeps 4 qubits.
    REQUIRE(square_tripartition(g, 0, 3).B.size() == 3);
}

TEST_CASE("boundary tripartition puts the outer ring in C", "[tripartition]") {
    GridGeometry g{9, 9};
    auto t = boundary_tripartition(g);
    REQUIRE(t.A == std::vector<std::size_t>{40});
    REQUIRE(t.C.size() == 32);
    REQUIRE(t.B.size() == 48);
    t.validate(81);
}

TEST_CASE("S of the identity circuit is S_Z with 2^|B| elements", "[S]") {
    GridGeometry g{5, 5};
    auto part = square_tripartition(g, grid_center(g), 3);
    auto c = instantiate(brickwork_template(5, 5, 3), SamplerPolicy::Identity, 0);
    auto S = compute_S(c, part);
    REQUIRE(S.log2_size[0] == -1);
    REQUIRE(S.log2_size[1] == -1);
    REQUIRE(S.log2_size[2] == 8);
    REQUIRE_FALSE(mie_present(c, part));
}

TEST_CASE("S on GHZ-type examples", "[S]") {
    Tripartition part{{0}, {1}, {2}};
    auto plain = compute_S(ghz3(false), part);
    REQUIRE(plain.log2_size[2] == 0);  // only Z1 Z2
    REQUIRE_FALSE(mie_present(ghz3(false), part));
    REQUIRE(compute_S(ghz3(true), part).is_empty());
    REQUIRE(mie_present(ghz3(true), part));

    // Bell pair between A and C with nothing measured.
    auto bell = empty_circuit(1, 2);
    append_gate(bell, CliffordGate::named("H"), {0});
    append_gate(bell, CliffordGate::named("CNOT"), {0, 1});
    REQUIRE(mie_present(bell, Tripartition{{0}, {}, {1}}));
    REQUIRE_THROWS(compute_S(bell, Tripartition{{0, 1}, {}, {}}));
}

TEST_CASE("compute_S agrees with brute-force enumeration", "[S]") {
    Rng rng(21);
    std::vector<CircuitTemplate> ts = {brickwork_template(3, 3, 2), brickwork_template(3, 4, 4), brickwork_template(2, 5, 6),
                                       coarse_grained_template(2, 2), compiled_coarse_grained_template(2, 2, 2)};
    std::size_t nonempty = 0, empty = 0;
    for (std::size_t rep = 0; rep < 40; ++rep) {
        const auto &t = ts[rep % ts.size()];
        auto c = instantiate(t, SamplerPolicy::Uniform, rng());
        auto part = random_tripartition(t.num_qubits(), rng);
        auto S = compute_S(c, part);
        auto brute = brute_force_S(c, part);
        for (int p = 0; p < 3; ++p) REQUIRE(S.size("XYZ"[p]) == static_cast<double>(brute[p]));
        (S.is_empty() ? empty : nonempty)++;
    }
    REQUIRE(empty > 0);
    REQUIRE(nonempty > 0);
}

TEST_CASE("postmeasurement purity is 1 exactly when S is non-empty", "[lemma1]") {
    Rng rng(22);
    std::vector<CircuitTemplate> ts = {brickwork_template(5, 5, 4), brickwork_template(6, 6, 7), coarse_grained_template(2, 4),
                                       compiled_coarse_grained_template(2, 2, 5)};
    for (std::size_t rep = 0; rep < 60; ++rep) {
        const auto &t = ts[rep % ts.size()];
        auto c = instantiate(t, SamplerPolicy::Uniform, rng());
        auto part = random_tripartition(t.num_qubits(), rng);
        bool s_nonempty = !compute_S(c, part).is_empty();
        for (int m = 0; m < 3; ++m) {
            auto p = sampled_postmeasurement_purity(c, part, rng);
            REQUIRE((p == Dyadic::make(1, 0)) == s_nonempty);
            REQUIRE((p == Dyadic::make(1, 0) || p == Dyadic::make(1, 1)));
        }
    }
}

TEST_CASE("GHZ with H on the middle qubit gives purity 1/2 for either outcome", "[lemma1]") {
    Tripartition part{{0}, {1}, {2}};
    std::set<bool> outcomes;
    for (std::uint64_t seed = 0; seed < 16; ++seed) {
        Rng rng(seed);
        auto state = run_circuit(ghz3(true));
        auto r = state.measure_z(1, rng);
        outcomes.insert(r.outcome);
        REQUIRE(state.region_purity({0}) == Dyadic::make(1, 1));
    }
    REQUIRE(outcomes.size() == 2);
}

TEST_CASE("chi for trivial and single-gate circuits", "[chi]") {
    auto id = brickwork_template(3, 3, 2);
    auto e = chi_estimate(id, {0, 4, 8}, 50, 1, SamplerPolicy::Identity);
    REQUIRE(e.chi == 63.0);
    REQUIRE(e.se == 0.0);
    REQUIRE(chi_estimate(id, {}, 10, 1).chi == 0.0);

    CircuitTemplate one;
    one.grid = {1, 2};
    one.depth = 1;
    one.slots = {{0, {0, 1}}};
    auto mc = chi_estimate(one, {0}, 20000, 5);
    REQUIRE(chi_haar(1, 2) == Catch::Approx(0.2));
    REQUIRE(std::abs(mc.chi - 0.2) <= 3 * mc.se);
}

TEST_CASE("Z expectation via backward conjugation matches the tableau", "[chi]") {
    Rng rng(23);
    for (std::size_t d = 0; d <= 5; ++d) {
        auto t = brickwork_template(5, 5, d);
        for (int rep = 0; rep < 20; ++rep) {
            auto c = instantiate(t, SamplerPolicy::Uniform, rng());
            std::size_t a = uniform_below(rng, 25);
            bool in_group = run_circuit(c).stabilizer_sign_of(PauliString::single(25, a, 'Z')).has_value();
            REQUIRE(z_expectation_squared(c, a) == (in_group ? 1.0 : 0.0));
        }
    }
}

TEST_CASE("depth lower bound on chi", "[chi]") {
    auto rows = chi_depth_lower_bound_check(6, 6, {0, 1, 3}, 4000, 9);
    REQUIRE(rows.size() == 3);
    REQUIRE(rows[0].estimate.mean == 1.0);
    for (const auto &r : rows) CHECK(r.pass);
}

TEST_CASE("theorem 3 check on identity and random ensembles", "[theorem3]") {
    GridGeometry g{5, 5};
    auto part = square_tripartition(g, grid_center(g), 3);
    auto id = theorem3_bound_check(brickwork_template(5, 5, 2), part, 20, 3, SamplerPolicy::Identity);
    REQUIRE(id.lhs.mean == 1.0);
    REQUIRE(id.rhs == Catch::Approx(0.5 + 0.5 * std::sqrt(3.0 * 256)));
    REQUIRE(id.pass);
    REQUIRE(id.mismatches == 0);

    auto rnd = theorem3_bound_check(brickwork_template(7, 7, 4), square_tripartition({7, 7}, 24, 5), 400, 4);
    REQUIRE(rnd.mismatches == 0);
    REQUIRE(rnd.pass);
    REQUIRE(rnd.lhs.mean >= 0.5);
    REQUIRE(rnd.lhs.mean <= 1.0);
}

TEST_CASE("mie scan basics and worker independence", "[scan]") {
    MieScanSpec spec;
    spec.arch = {"brickwork", 0, 0, 0};
    spec.params = {0, 3};
    spec.grids = {5, 7};
    spec.trials = 30;
    spec.seed = 77;
    auto a = mie_scan(spec, 1);
    auto b = mie_scan(spec, 3);
    REQUIRE(a.size() == 4);
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].mean_purity == b[i].mean_purity);
        REQUIRE(a[i].se == b[i].se);
        REQUIRE(a[i].mean_purity >= 0.5);
        REQUIRE(a[i].mean_purity <= 1.0);
    }
    REQUIRE(a[0].mean_purity == 1.0);
    REQUIRE(a[1].mean_purity == 1.0);
    REQUIRE(a[1].L == 5);
    REQUIRE(a[1].grid == "7x7");

    spec.geometry = ScanGeometry::Square;
    spec.arch.rows = spec.arch.cols = 9;
    spec.Ls = {1, 3, 5};
    auto sq = mie_scan(spec, 2);
    REQUIRE(sq.size() == 6);
    REQUIRE(sq[0].mean_purity == 1.0);
}
