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

#include "miesim/architectures.hpp"
#include "miesim/circuit.hpp"
#include "miesim/clifford_sampling.hpp"
#include "miesim/gf2.hpp"
#include "miesim/tableau.hpp"
#include "test_util.hpp"

using namespace miesim;
using testutil::Mat;

namespace {

PauliString random_pauli(std::size_t n, Rng &rng) {
    PauliString p(n);
    for (std::size_t q = 0; q < n; ++q) {
        auto r = rng() % 4;
        p.set(q, "IXYZ"[r]);
    }
    p.sign = rng() & 1;
    return p;
}

GF2Matrix random_matrix(std::size_t r, std::size_t c, Rng &rng, double density = 0.5) {
    GF2Matrix m(r, c);
    std::bernoulli_distribution b(density);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m.set(i, j, b(rng));
    return m;
}

}  // namespace

TEST_CASE("64-bit block transpose matches bit-by-bit transpose", "[bits]") {
    Rng rng(1);
    for (std::size_t rows : {1u, 63u, 64u, 65u, 130u}) {
        for (std::size_t cols : {1u, 64u, 100u}) {
            GF2Matrix m(rows, cols);
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < cols; ++j) m.set(i, j, rng() & 1);
            GF2Matrix t = m.transpose();
            REQUIRE(t.rows() == cols);
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < cols; ++j) REQUIRE(t.get(j, i) == m.get(i, j));
        }
    }
}

TEST_CASE("GF2 rank, kernel, solve and inverse", "[gf2]") {
    Rng rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t r = 1 + rng() % 40, c = 1 + rng() % 40;
        auto m = random_matrix(r, c, rng, trial % 2 ? 0.5 : 0.1);
        auto ker = m.kernel();
        CHECK(m.rank() + ker.size() == c);
        for (const auto &v : ker) CHECK((m * v).none());
        BitVector x(c);
        for (std::size_t j = 0; j < c; ++j) x.set(j, rng() & 1);
        auto b = m * x;
        auto sol = m.solve(b);
        REQUIRE(sol.has_value());
        CHECK(m * *sol == b);
    }
    auto id = GF2Matrix::identity(5);
    CHECK(id.inverse().value() == id);
    for (int trial = 0; trial < 20; ++trial) {
        auto m = random_matrix(12, 12, rng);
        auto inv = m.inverse();
        CHECK(inv.has_value() == (m.rank() == 12));
        if (inv) CHECK(m * *inv == GF2Matrix::identity(12));
    }
    GF2Matrix singular(2, 2);
    singular.set(0, 0, true);
    singular.set(1, 0, true);
    CHECK_FALSE(singular.inverse().has_value());
    BitVector rhs(2);
    rhs.set(0);
    CHECK_FALSE(singular.solve(rhs).has_value());
}

TEST_CASE("Echelon basis agrees with dense rank and reports null combinations", "[gf2]") {
    Rng rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t r = 1 + rng() % 70, c = 1 + rng() % 150;
        auto m = random_matrix(r, c, rng, 0.2);
        EchelonBasis basis(c, r);
        std::size_t nulls = 0;
        for (std::size_t i = 0; i < r; ++i) {
            auto row = m.row_vector(i);
            BitVector payload(r);
            payload.set(i);
            if (!basis.insert(row.data(), payload.data())) {
                ++nulls;
                BitVector sum(c);
                for (auto j : payload.ones()) sum ^= m.row_vector(j);
                CHECK(sum.none());
            }
        }
        CHECK(basis.rank() == m.rank());
        CHECK(nulls + basis.rank() == r);
    }
}

TEST_CASE("Pauli products carry the phase of the matrix product", "[pauli]") {
    Rng rng(4);
    for (int trial = 0; trial < 300; ++trial) {
        auto a = random_pauli(3, rng), b = random_pauli(3, rng);
        Mat prod = testutil::pauli_matrix(a) * testutil::pauli_matrix(b);
        PauliString c = a;
        unsigned odd = c.multiply_right(b);
        Mat got = testutil::pauli_matrix(c);
        if (odd) {
            for (auto &v : got.a) v *= testutil::cd(0, 1);
        }
        CHECK(testutil::distance(prod, got) < 1e-12);
        CHECK(a.commutes(b) == (odd == 0));
    }
    CHECK(PauliString::from_string("-XY_Z").str() == "-XYIZ");
    CHECK(PauliString::from_string("+IZZ").is_z_type());
    CHECK(PauliString::from_string("XIY").weight() == 2);
    CHECK_THROWS(PauliString::from_string("XQ"));
}

TEST_CASE("Named gates conjugate Paulis like their matrices", "[gate]") {
    for (std::string name : {"H", "S", "S_DAG", "X", "Y", "Z", "SQRT_X", "CNOT", "CZ", "SWAP"}) {
        auto g = CliffordGate::named(name);
        REQUIRE(g.is_valid());
        Mat u = testutil::named_matrix(name);
        std::size_t k = g.num_qubits();
        for (std::size_t code = 1; code < (std::size_t{1} << (2 * k)); ++code) {
            PauliString p(k);
            for (std::size_t j = 0; j < k; ++j) p.set(j, "IXZY"[(code >> (2 * j)) & 3]);
            Mat expect = u * testutil::pauli_matrix(p) * testutil::dagger(u);
            CHECK(testutil::distance(expect, testutil::pauli_matrix(g.conjugate(p))) < 1e-12);
            Mat back = testutil::dagger(u) * testutil::pauli_matrix(p) * u;
            CHECK(testutil::distance(back, testutil::pauli_matrix(g.conjugate_inverse(p))) < 1e-12);
        }
    }
}

TEST_CASE("Gate composition and inverse", "[gate]") {
    Rng rng(5);
    for (std::size_t k : {1u, 2u, 3u, 5u, 70u}) {
        auto g = sample_uniform_clifford(k, rng), h = sample_uniform_clifford(k, rng);
        CHECK(g.then(g.inverse()) == CliffordGate::identity(k));
        CHECK(g.inverse().then(g) == CliffordGate::identity(k));
        auto gh = g.then(h);
        CHECK(gh.is_valid());
        auto p = sample_nonidentity_pauli(k, rng);
        CHECK(gh.conjugate(p) == h.conjugate(g.conjugate(p)));
    }
    CHECK_THROWS(CliffordGate::from_images({PauliString::from_string("X")}, {PauliString::from_string("X")}));
    CHECK_THROWS(CliffordGate::named("T"));
}

TEST_CASE("Zero state and single-qubit measurement", "[tableau]") {
    auto t = StabilizerTableau::new_zero_state(3);
    CHECK(t.validate());
    Rng rng(6);
    for (std::size_t q = 0; q < 3; ++q) {
        auto r = t.measure_z(q, rng);
        CHECK(r.deterministic);
        CHECK_FALSE(r.outcome);
    }
    int ones = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        auto s = StabilizerTableau::new_zero_state(1);
        std::vector<std::size_t> q0{0};
        s.apply_gate(CliffordGate::named("H"), q0);
        auto first = s.measure_z(0, rng);
        CHECK_FALSE(first.deterministic);
        auto second = s.measure_z(0, rng);
        CHECK(second.deterministic);
        CHECK(second.outcome == first.outcome);
        ones += first.outcome;
        CHECK(s.validate());
    }
    // Binomial(2000, 1/2): 5 sigma is about 112.
    CHECK(std::abs(ones - 1000) < 112);
}

TEST_CASE("Bell pair outcomes are correlated and purities are 1/2", "[tableau]") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        auto t = StabilizerTableau::new_zero_state(2);
        t.apply_gate(CliffordGate::named("H"), std::vector<std::size_t>{0});
        t.apply_gate(CliffordGate::named("CNOT"), std::vector<std::size_t>{0, 1});
        CHECK(t.region_purity({0}) == Dyadic::make(1, 1));
        CHECK(t.region_purity({0, 1}) == Dyadic::make(1, 0));
        auto a = t.measure_z(0, rng);
        auto b = t.measure_z(1, rng);
        CHECK(b.deterministic);
        CHECK(a.outcome == b.outcome);
        CHECK(t.region_purity({0}) == Dyadic::make(1, 0));
    }
}

TEST_CASE("Forced measurement returns outcome probabilities", "[tableau]") {
    auto t = StabilizerTableau::new_zero_state(2);
    CHECK(t.force_measure_z(0, true) == 0.0);
    CHECK(t.force_measure_z(0, false) == 1.0);
    t.apply_gate(CliffordGate::named("H"), std::vector<std::size_t>{1});
    CHECK(t.force_measure_z(1, true) == 0.5);
    CHECK(t.peek_z(1).value() == true);
}

TEST_CASE("Qubit-major batch application equals row-wise application", "[tableau]") {
    Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t rows = 2 + rng() % 5, cols = 2 + rng() % 30;
        auto c = instantiate(brickwork_template(rows, cols, 1 + rng() % 6), SamplerPolicy::Uniform, rng());
        c.tmpl.depth += 1;
        for (std::size_t q = 0; q < c.num_qubits(); q += 3) {
            c.tmpl.slots.push_back({c.tmpl.depth - 1, {q}});
            c.gates.push_back(sample_uniform_clifford(1, rng));
        }
        auto fast = run_circuit(c);
        auto slow = StabilizerTableau::new_zero_state(c.num_qubits());
        for (std::size_t i = 0; i < c.gates.size(); ++i) slow.apply_gate(c.gates[i], c.tmpl.slots[i].support);
        REQUIRE(fast.validate());
        for (std::size_t i = 0; i < c.num_qubits(); ++i) {
            CHECK(fast.stabilizer(i) == slow.stabilizer(i));
            CHECK(fast.destabilizer(i) == slow.destabilizer(i));
        }
    }
}

TEST_CASE("Region purity is symmetric under complement", "[tableau]") {
    Rng rng(9);
    for (int trial = 0; trial < 30; ++trial) {
        auto c = instantiate(brickwork_template(3, 4, 1 + rng() % 5), SamplerPolicy::Uniform, rng());
        auto t = run_circuit(c);
        std::vector<std::size_t> r, rc;
        for (std::size_t q = 0; q < 12; ++q) (rng() & 1 ? r : rc).push_back(q);
        CHECK(t.region_purity(r) == t.region_purity(rc));
    }
}

TEST_CASE("Stabilizer sign lookup and state equality", "[tableau]") {
    Rng rng(10);
    auto g = sample_uniform_clifford(4, rng);
    auto t = StabilizerTableau::from_gate(g);
    REQUIRE(t.validate());
    for (std::size_t j = 0; j < 4; ++j) {
        CHECK(t.stabilizer_sign_of(g.z_image(j)).value() == false);
        auto neg = g.z_image(j);
        neg.sign = !neg.sign;
        CHECK(t.stabilizer_sign_of(neg).value() == true);
        CHECK_FALSE(t.stabilizer_sign_of(g.x_image(j)).has_value());
    }
    auto rebuilt = StabilizerTableau::from_stabilizers(t.stabilizers());
    CHECK(rebuilt.validate());
    CHECK(rebuilt.same_state(t));
    auto other = StabilizerTableau::new_zero_state(4);
    CHECK(other.same_state(t) == t.same_state(other));
}

TEST_CASE("Reduced state of a region after measuring the rest", "[tableau]") {
    Rng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        auto c = instantiate(brickwork_template(2, 4, 4), SamplerPolicy::Uniform, rng());
        auto t = run_circuit(c);
        std::vector<std::size_t> keep{1, 6, 3};
        for (std::size_t q = 0; q < 8; ++q) {
            if (std::find(keep.begin(), keep.end(), q) == keep.end()) t.measure_z(q, rng);
        }
        auto sub = t.reduced_pure_state(keep);
        REQUIRE(sub.validate());
        for (std::size_t i = 0; i < 3; ++i) {
            auto s = sub.stabilizer(i);
            PauliString big(8);
            big.sign = s.sign;
            for (std::size_t j = 0; j < 3; ++j) big.set(keep[j], s.get(j));
            CHECK(t.stabilizer_sign_of(big).value() == false);
        }
    }
}

TEST_CASE("Circuit conjugation of Paulis", "[circuit]") {
    CliffordCircuit c;
    c.tmpl.grid = {1, 2};
    c.tmpl.depth = 1;
    c.tmpl.slots = {{0, {0, 1}}};
    c.gates = {CliffordGate::named("CNOT")};
    auto back = conjugate_pauli(c, PauliString::from_string("IZ"), Direction::Backward);
    CHECK(back.str() == "+ZZ");
    auto fwd = conjugate_pauli(c, PauliString::from_string("XI"), Direction::Forward);
    CHECK(fwd.str() == "+XX");

    Rng rng(12);
    auto rc = instantiate(brickwork_template(3, 3, 5), SamplerPolicy::Uniform, 99);
    for (int trial = 0; trial < 20; ++trial) {
        auto p = random_pauli(9, rng);
        auto there = conjugate_pauli(rc, p, Direction::Forward);
        CHECK(conjugate_pauli(rc, there, Direction::Backward) == p);
    }
    auto t = run_circuit(rc);
    auto rows = stabilizer_rows(rc);
    for (std::size_t q = 0; q < 9; ++q) {
        auto img = conjugate_pauli(rc, PauliString::single(9, q, 'Z'), Direction::Forward);
        CHECK(t.stabilizer(q) == img);
        CHECK(rows.row(q).equal_up_to_sign(img));
    }
}

TEST_CASE("Unsigned rows of large block gates match signed tableau rows", "[circuit]") {
    auto c = instantiate(coarse_grained_template(2, 8), SamplerPolicy::Uniform, 5);
    auto t = run_circuit(c);
    auto rows = stabilizer_rows(c);
    for (std::size_t q = 0; q < c.num_qubits(); ++q) CHECK(rows.row(q).equal_up_to_sign(t.stabilizer(q)));
}
