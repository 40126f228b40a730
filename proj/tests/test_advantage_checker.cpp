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

#include "miesim/advantage.hpp"
#include "miesim/dense.hpp"
#include "test_util.hpp"

using namespace miesim;

namespace {

// Hermitian reflections (X+Z)/sqrt2 and (Y+Z)/sqrt2 written out by hand.
DenseMatrix q_dense(unsigned b) {
    const double r = 1.0 / std::sqrt(2.0);
    DenseMatrix m(2);
    if (b == 0) {
        m(0, 0) = r, m(0, 1) = r, m(1, 0) = r, m(1, 1) = -r;
    } else if (b == 1) {
        m(0, 0) = r, m(0, 1) = cplx(0, -r), m(1, 0) = cplx(0, r), m(1, 1) = -r;
    } else {
        m(0, 0) = 1, m(1, 1) = 1;
    }
    return m;
}

bool dense_amplitude_zero(DenseState s, const Triple &t, const BasisChoice &b, const std::vector<std::uint8_t> &m) {
    for (std::size_t k = 0; k < 3; ++k) apply_unitary(s, q_dense(b[k]), {t[k]});
    std::size_t idx = 0;
    for (std::size_t q = 0; q < m.size(); ++q) idx |= std::size_t{m[q]} << q;
    return std::abs(s.amplitudes()[idx]) < 1e-9;
}

CliffordCircuit random_circuit(std::size_t n, std::size_t gates, Rng &rng) {
    auto c = empty_circuit(1, n);
    for (std::size_t g = 0; g < gates; ++g) {
        std::size_t k = 1 + uniform_below(rng, std::min<std::size_t>(2, n));
        std::vector<std::size_t> qs;
        while (qs.size() < k) {
            std::size_t q = uniform_below(rng, n);
            if (std::find(qs.begin(), qs.end(), q) == qs.end()) qs.push_back(q);
        }
        append_gate(c, sample_uniform_clifford(k, rng), qs);
    }
    return c;
}

std::vector<std::uint8_t> bits_of(unsigned v, std::size_t n) {
    std::vector<std::uint8_t> out(n);
    for (std::size_t q = 0; q < n; ++q) out[q] = (v >> q) & 1;
    return out;
}

}  // namespace

TEST_CASE("basis change gates conjugate as expected") {
    CHECK(basis_change(0).conjugate(PauliString::from_string("+Z")) == PauliString::from_string("+X"));
    CHECK(basis_change(1).conjugate(PauliString::from_string("+Z")) == PauliString::from_string("+Y"));
    CHECK(basis_change(1).conjugate(PauliString::from_string("+X")) == PauliString::from_string("-X"));
    CHECK(basis_change(2).conjugate(PauliString::from_string("+Z")) == PauliString::from_string("+Z"));
    for (unsigned b = 0; b < 3; ++b) CHECK(q_dense(b).unitarity_error() < 1e-12);
    CHECK_THROWS_AS(basis_change(3), std::invalid_argument);
}

TEST_CASE("worked amplitudes on GHZ3") {
    auto ghz = ghz3_state();
    Triple t{0, 1, 2};
    CHECK(amplitude_is_zero(ghz, t, {2, 2, 2}, {0, 0, 1}));
    CHECK_FALSE(amplitude_is_zero(ghz, t, {0, 0, 0}, {0, 0, 0}));
    CHECK_FALSE(amplitude_is_zero(StabilizerTableau::new_zero_state(3), t, {2, 2, 2}, {0, 0, 0}));
    CHECK_THROWS_AS(amplitude_is_zero(ghz, t, {0, 0, 0}, {0, 0}), std::invalid_argument);
}

TEST_CASE("amplitude test agrees with dense amplitudes") {
    Rng rng = make_rng(71);
    for (int rep = 0; rep < 30; ++rep) {
        std::size_t n = 3 + uniform_below(rng, 4);
        auto c = random_circuit(n, 4 * n, rng);
        auto tab = run_circuit(c);
        auto dense = run_dense(c);
        Triple t = sample_triple(n, rng);
        for (unsigned idx = 0; idx < 27; ++idx) {
            auto b = basis_of_index(idx);
            for (unsigned m = 0; m < (1u << n); m += 1 + uniform_below(rng, 3)) {
                auto bits = bits_of(m, n);
                CHECK(amplitude_is_zero(tab, t, b, bits) == dense_amplitude_zero(dense, t, b, bits));
            }
        }
    }
}

TEST_CASE("local function validation") {
    Triple t{0, 1, 2};
    auto f = LocalFunction::triple_tables(1, 2, 4);
    CHECK_NOTHROW(f.validate(t));
    f.bits[0].tag = LocalFunction::I;
    CHECK_THROWS_AS(f.validate(t), std::invalid_argument);
    auto g = LocalFunction::constant({0, 1, 0, 1});
    CHECK_NOTHROW(g.validate(t));
    g.bits[3].tag = LocalFunction::H;  // bits outside the triple may read any one input
    g.bits[3].table = {1, 0, 1};
    CHECK_NOTHROW(g.validate(t));
    CHECK(g({0, 1, 2})[3] == 1);
    CHECK(g({1, 1, 2})[3] == 0);
}

TEST_CASE("exhaustive search on GHZ3") {
    auto r = exhaustive_minimum_failure(ghz3_state());
    CHECK(r.functions == 512);
    CHECK(r.failures.size() == 512);
    CHECK(r.min_failures >= 1);
    CHECK(r.min_rate() >= 1.0 / 27.0);
    auto best = LocalFunction::triple_tables(r.argmin & 7, (r.argmin >> 3) & 7, r.argmin >> 6);
    auto direct = failure_rate(ghz3_state(), {0, 1, 2}, best);
    CHECK(direct.failures == r.min_failures);
    CHECK(direct.precondition_ok);
}

TEST_CASE("exhaustive search on locally rotated GHZ3") {
    Rng rng = make_rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        std::array<CliffordGate, 3> u{sample_uniform_clifford(1, rng), sample_uniform_clifford(1, rng),
                                      sample_uniform_clifford(1, rng)};
        auto s = apply_local(ghz3_state(), u);
        REQUIRE(ghz_witness(s).has_value());
        CHECK(has_ghz_type_mie(s, {0, 1, 2}));
        auto r = exhaustive_minimum_failure(s);
        CHECK(r.min_failures >= 1);
    }
}

TEST_CASE("product state admits a perfect local function") {
    auto s = StabilizerTableau::new_zero_state(3);
    auto r = failure_rate(s, {0, 1, 2}, LocalFunction::constant({0, 0, 0}));
    CHECK(r.failures == 0);
    CHECK_FALSE(r.precondition_ok);
    CHECK_FALSE(r.meets_bound());
}

TEST_CASE("failure counts are invariant under relabeling the triple") {
    // GHZ3 on qubits (0,1,2) of 3 vs the same function on a permuted triple.
    auto ghz = ghz3_state();
    Rng rng = make_rng(9);
    for (int rep = 0; rep < 40; ++rep) {
        unsigned id = static_cast<unsigned>(uniform_below(rng, 512));
        unsigned th = id & 7, ti = (id >> 3) & 7, tj = id >> 6;
        auto f = LocalFunction::triple_tables(th, ti, tj);
        auto base = failure_rate(ghz, {0, 1, 2}, f);
        // Triple (2,0,1): output bit 2 reads b_h, bit 0 reads b_i, bit 1 reads b_j.
        LocalFunction g;
        g.bits.resize(3);
        g.bits[2] = f.bits[0];
        g.bits[0] = f.bits[1];
        g.bits[1] = f.bits[2];
        auto moved = failure_rate(ghz, {2, 0, 1}, g);
        CHECK(base.failures == moved.failures);
    }
}

TEST_CASE("larger states with a GHZ-type triple") {
    Rng rng = make_rng(13);
    int found = 0;
    for (int rep = 0; rep < 200 && found < 10; ++rep) {
        std::size_t n = 5;
        auto c = random_circuit(n, 12, rng);
        auto tab = run_circuit(c);
        Triple t = sample_triple(n, rng);
        if (!has_ghz_type_mie(tab, t)) continue;
        ++found;
        for (int k = 0; k < 20; ++k) {
            LocalFunction f;
            f.bits.resize(n);
            for (std::size_t q = 0; q < n; ++q) {
                int tag = static_cast<int>(uniform_below(rng, 4)) - 1;
                for (std::size_t j = 0; j < 3; ++j)
                    if (t[j] == q) tag = uniform_below(rng, 2) ? static_cast<int>(j) : LocalFunction::None;
                f.bits[q].tag = tag;
                f.bits[q].constant = uniform_below(rng, 2);
                for (auto &v : f.bits[q].table) v = uniform_below(rng, 2);
            }
            auto r = failure_rate(tab, t, f);
            CHECK(r.precondition_ok);
            CHECK(r.meets_bound());
        }
    }
    CHECK(found >= 5);
}

TEST_CASE("advantage CSV schema") {
    auto r = exhaustive_minimum_failure(ghz3_state());
    std::ostringstream os;
    write_advantage_csv(os, "ghz3", r, true);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "state,function_id,rate");
    std::size_t rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 512);
    CHECK(advantage_summary("ghz3", r).rfind("# ghz3", 0) == 0);
}
