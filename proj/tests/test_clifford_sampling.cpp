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

#include <cmath>
#include <map>
#include <unordered_map>

#include "miesim/clifford_sampling.hpp"
#include "miesim/tableau.hpp"

using namespace miesim;

namespace {

// |observed - expected| within z standard deviations of a binomial count.
bool within_sigma(std::size_t count, std::size_t n, double p, double z) {
    double sd = std::sqrt(static_cast<double>(n) * p * (1 - p));
    return std::abs(static_cast<double>(count) - static_cast<double>(n) * p) <= z * sd;
}

}  // namespace

TEST_CASE("single-qubit Clifford group has 24 elements", "[enumerate]") {
    auto g = enumerate_clifford_group(1);
    REQUIRE(g.size() == 24);
    std::unordered_set<CliffordGate> seen(g.begin(), g.end());
    REQUIRE(seen.size() == 24);
    REQUIRE(std::count(g.begin(), g.end(), CliffordGate::identity(1)) == 1);
    for (const auto &c : g) REQUIRE(c.is_valid());
}

TEST_CASE("two-qubit Clifford group has 11520 elements", "[enumerate]") {
    auto g = enumerate_clifford_group(2);
    REQUIRE(g.size() == 11520);
    std::unordered_set<CliffordGate> seen(g.begin(), g.end());
    REQUIRE(seen.size() == 11520);
    REQUIRE(std::count(g.begin(), g.end(), CliffordGate::identity(2)) == 1);
    REQUIRE_THROWS(enumerate_clifford_group(3));
    REQUIRE_THROWS(enumerate_clifford_group(0));
}

TEST_CASE("image of +Z under the 24 single-qubit Cliffords covers the 6 signed Paulis evenly", "[enumerate]") {
    std::map<std::string, int> counts;
    for (const auto &c : enumerate_clifford_group(1)) ++counts[c.z_image(0).str()];
    REQUIRE(counts.size() == 6);
    for (const auto &[k, v] : counts) REQUIRE(v == 4);
}

TEST_CASE("k=1 sampled states are uniform over the six stabilizer states", "[sample]") {
    Rng rng(11);
    const std::size_t N = 24000;
    std::map<std::string, std::size_t> counts;
    for (std::size_t i = 0; i < N; ++i) ++counts[sample_uniform_clifford(1, rng).z_image(0).str()];
    REQUIRE(counts.size() == 6);
    for (const auto &[k, v] : counts) REQUIRE(within_sigma(v, N, 1.0 / 6, 3));
}

TEST_CASE("k=2 samples pass a chi-squared uniformity test over the group", "[sample]") {
    auto group = enumerate_clifford_group(2);
    std::unordered_map<CliffordGate, std::size_t> index;
    for (std::size_t i = 0; i < group.size(); ++i) index[group[i]] = i;
    const std::size_t per = 20, N = per * group.size();
    std::vector<std::size_t> counts(group.size(), 0);
    Rng rng(12);
    for (std::size_t i = 0; i < N; ++i) {
        auto it = index.find(sample_uniform_clifford(2, rng));
        REQUIRE(it != index.end());
        ++counts[it->second];
    }
    double chi2 = 0;
    for (auto c : counts) chi2 += (static_cast<double>(c) - per) * (static_cast<double>(c) - per) / per;
    double df = static_cast<double>(group.size() - 1);
    // chi2 with df degrees of freedom has mean df and standard deviation sqrt(2 df).
    CHECK(std::abs(chi2 - df) < 4 * std::sqrt(2 * df));
}

TEST_CASE("k=2 marginal sign and symplectic parts are uniform", "[sample]") {
    // Each of the 30 signed non-identity images of X_1 should appear equally often.
    Rng rng(13);
    const std::size_t N = 60000;
    std::map<std::string, std::size_t> counts;
    for (std::size_t i = 0; i < N; ++i) ++counts[sample_uniform_clifford(2, rng).x_image(0).str()];
    REQUIRE(counts.size() == 30);
    for (const auto &[k, v] : counts) CHECK(within_sigma(v, N, 1.0 / 30, 4));
}

TEST_CASE("sampled gates are valid Cliffords across sizes", "[sample]") {
    Rng rng(14);
    for (std::size_t k : {1u, 2u, 3u, 7u, 63u, 64u, 65u, 130u, 256u}) {
        for (int rep = 0; rep < 3; ++rep) REQUIRE(sample_uniform_clifford(k, rng).is_valid());
    }
    REQUIRE(sample_uniform_clifford(1024, rng).is_valid());
}

TEST_CASE("sampled symplectic matrices are uniform for k=2 over 720 classes", "[sample]") {
    // |Sp(4,2)| = 720; each class has 16 sign patterns.
    Rng rng(15);
    const std::size_t N = 72000;
    std::map<std::string, std::size_t> counts;
    for (std::size_t i = 0; i < N; ++i) {
        auto g = sample_uniform_clifford(2, rng);
        std::string key;
        for (std::size_t j = 0; j < 4; ++j) {
            auto p = g.image(j);
            p.sign = false;
            key += p.str();
        }
        ++counts[key];
    }
    REQUIRE(counts.size() == 720);
    double chi2 = 0;
    for (const auto &[k, v] : counts) chi2 += (static_cast<double>(v) - 100.0) * (static_cast<double>(v) - 100.0) / 100.0;
    CHECK(std::abs(chi2 - 719) < 4 * std::sqrt(2 * 719.0));
}

TEST_CASE("sample_nonidentity_pauli is uniform and never the identity", "[pauli]") {
    Rng rng(16);
    REQUIRE_THROWS(sample_nonidentity_pauli(0, rng));
    std::map<std::string, std::size_t> c1;
    for (int i = 0; i < 3000; ++i) {
        auto p = sample_nonidentity_pauli(1, rng);
        REQUIRE_FALSE(p.sign);
        ++c1[p.str()];
    }
    REQUIRE(c1.size() == 3);
    REQUIRE(c1.count("+I") == 0);

    const std::size_t N = 150000;
    std::map<std::string, std::size_t> c2;
    for (std::size_t i = 0; i < N; ++i) {
        auto p = sample_nonidentity_pauli(2, rng);
        REQUIRE_FALSE(p.is_identity());
        ++c2[p.str()];
    }
    REQUIRE(c2.size() == 15);
    for (const auto &[k, v] : c2) CHECK(within_sigma(v, N, 1.0 / 15, 3));
}

TEST_CASE("exhaustive two-qubit Clifford average reproduces the two-design value 1/5", "[design]") {
    // chi = 4 E[P_A(0)^2] - 1 with A = qubit 0 of C|00>. Probabilities are 0, 1/2 or 1, so
    // 4 * sum P^2 is an integer and the comparison is exact.
    long long four_sum = 0;
    auto group = enumerate_clifford_group(2);
    for (const auto &g : group) {
        auto t = StabilizerTableau::from_gate(g);
        double p = t.force_measure_z(0, false);
        four_sum += static_cast<long long>(std::lround(4 * p * p));
    }
    // four_sum / N - 1 == 1/5  <=>  5 * four_sum == 6 * N
    REQUIRE(5 * four_sum == 6 * static_cast<long long>(group.size()));
}
