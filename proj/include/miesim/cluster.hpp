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


// Pauli clusters on the second-layer block grid of the coarse-grained architecture, the
// Z-type conjugation bounds stated in terms of cluster size and perimeter, and Monte Carlo
// checks of those bounds.

#ifndef MIESIM_CLUSTER_HPP
#define MIESIM_CLUSTER_HPP

#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "miesim/architectures.hpp"
#include "miesim/clifford_sampling.hpp"
#include "miesim/mie.hpp"
#include "miesim/parallel.hpp"
#include "miesim/stats.hpp"

namespace miesim {

/// Subset of the m x m grid of second-layer blocks.
struct Cluster {
    std::size_t m = 0;
    std::vector<bool> cells;  // row-major, m * m

    explicit Cluster(std::size_t side = 0) : m(side), cells(side * side, false) {}

    static Cluster from_cells(std::size_t side, const std::vector<std::pair<std::size_t, std::size_t>> &rc) {
        Cluster c(side);
        for (auto [r, col] : rc) c.set(r, col);
        return c;
    }

    bool contains(std::size_t r, std::size_t c) const { return cells[r * m + c]; }
    void set(std::size_t r, std::size_t c) {
        if (r >= m || c >= m) throw std::out_of_range("cluster cell outside the grid");
        cells[r * m + c] = true;
    }
};

struct ClusterStats {
    std::size_t size = 0;       // a
    std::size_t perimeter = 0;  // l
};

/// Blocks (r, c) covering rows [r tau, (r+1) tau) and columns [c tau, (c+1) tau) that meet supp(p).
inline Cluster cluster_of(const PauliString &p, std::size_t m, std::size_t tau) {
    std::size_t side = m * tau;
    if (m == 0 || tau == 0 || p.num_qubits() != side * side) {
        throw std::invalid_argument("Pauli width does not match an (m tau) x (m tau) grid");
    }
    Cluster c(m);
    for (auto q : p.support()) c.set((q / side) / tau, (q % side) / tau);
    return c;
}

/// Size and perimeter. Only edges between two grid cells count; the outer boundary does not.
inline ClusterStats stats_of(const Cluster &c) {
    ClusterStats s;
    for (std::size_t r = 0; r < c.m; ++r) {
        for (std::size_t col = 0; col < c.m; ++col) {
            bool in = c.contains(r, col);
            s.size += in;
            if (r + 1 < c.m && in != c.contains(r + 1, col)) ++s.perimeter;
            if (col + 1 < c.m && in != c.contains(r, col + 1)) ++s.perimeter;
        }
    }
    return s;
}

/// Pr[D^dag P D is Z-type] <= 2^-(a tau^2 + l (tau^2/12 - 1)/4) for coarse-grained D.
inline double lemma3_bound(std::size_t a, std::size_t l, std::size_t tau) {
    double t2 = static_cast<double>(tau * tau);
    return std::exp2(-(static_cast<double>(a) * t2 + static_cast<double>(l) * (t2 / 12 - 1) / 4));
}

/// Same probability for compiled circuits: 2^-(a tau^2 + l (tau^2/12 - 2)/4 - 1).
inline double compiled_bound(std::size_t a, std::size_t l, std::size_t tau) {
    double t2 = static_cast<double>(tau * tau);
    return std::exp2(-(static_cast<double>(a) * t2 + static_cast<double>(l) * (t2 / 12 - 2) / 4 - 1));
}

/// E|{s in S : Per = l}| <= 2^(l (2 log2 m - tau^2/48 + 5)).
inline double lemma4_bound(std::size_t l, std::size_t m, std::size_t tau) {
    double t2 = static_cast<double>(tau * tau);
    return std::exp2(static_cast<double>(l) * (2 * std::log2(static_cast<double>(m)) - t2 / 48 + 5));
}

/// E|S| <= 3 / 2^(|C|+1) + 2 * 2^(-tau^2/100), valid for tau >= sqrt(1000 log2 m).
inline double lemma5_bound(std::size_t c_size, std::size_t tau) {
    return 3 * std::exp2(-static_cast<double>(c_size) - 1) + 2 * std::exp2(-static_cast<double>(tau * tau) / 100);
}

inline bool lemma5_regime(std::size_t m, std::size_t tau) {
    return static_cast<double>(tau * tau) >= 1000 * std::log2(static_cast<double>(m));
}

/// One row of the cluster-check CSV.
struct ClusterCheckRow {
    std::string check;
    std::size_t m = 0, tau = 0, a = 0, l = 0;
    double bound = 0;
    Estimate estimate;
    std::uint64_t seed = 0;

    /// A bound of 1 or more says nothing; such rows are informational and always pass.
    bool informational() const { return bound >= 1; }
    bool pass() const { return informational() || estimate.mean <= bound + 3 * estimate.se; }
};

inline void write_cluster_csv_header(std::ostream &os) { os << "check,m,tau,a,l,bound,estimate,stderr,trials,seed\n"; }

inline void write_cluster_csv_row(std::ostream &os, const ClusterCheckRow &r) {
    os << r.check << ',' << r.m << ',' << r.tau << ',' << r.a << ',' << r.l << ',' << r.bound << ','
       << r.estimate.mean << ',' << r.estimate.se << ',' << r.estimate.n << ',' << r.seed << '\n';
}

/// D^dag p D for a circuit drawn from `tmpl`, sampling only the gates that act on the Pauli as
/// it is pulled back. Gates are independent, so this has the law of a full instance.
inline PauliString pull_back_random(const CircuitTemplate &tmpl, PauliString p, Rng &rng) {
    for (std::size_t i = tmpl.slots.size(); i-- > 0;) {
        const auto &support = tmpl.slots[i].support;
        bool touched = false;
        for (auto q : support) touched = touched || p.xs[q] || p.zs[q];
        if (!touched) continue;
        std::size_t k = support.size();
        CliffordGate g = sample_uniform_clifford(k, rng);
        PauliString local(k);
        for (std::size_t j = 0; j < k; ++j) {
            local.xs.set(j, p.xs[support[j]]);
            local.zs.set(j, p.zs[support[j]]);
        }
        PauliString out = g.conjugate_inverse(local);
        for (std::size_t j = 0; j < k; ++j) {
            p.xs.set(support[j], out.xs[j]);
            p.zs.set(support[j], out.zs[j]);
        }
    }
    return p;
}

/// Frequency of D^dag P D being Z-type over random circuits of a coarse-grained or compiled
/// architecture, with the matching bound from the cluster of P.
inline ClusterCheckRow ztype_probability_mc(const PauliString &pattern, const ArchitectureSpec &arch, std::size_t trials,
                                            std::uint64_t seed, std::size_t workers = 0) {
    if (arch.kind != "coarse" && arch.kind != "compiled") {
        throw std::invalid_argument("Z-type bound applies to coarse or compiled architectures");
    }
    auto tmpl = arch.build();
    if (pattern.num_qubits() != tmpl.num_qubits()) throw std::invalid_argument("Pauli width does not match the layout");
    ClusterStats st = stats_of(cluster_of(pattern, arch.m, arch.tau));
    std::string tag = "ztype/" + arch.label() + "/" + pattern.str();
    auto hits = parallel_map<int>(
        trials,
        [&](std::size_t i) {
            Rng rng = trial_rng(seed, tag, i);
            return pull_back_random(tmpl, pattern, rng).is_z_type() ? 1 : 0;
        },
        workers);
    std::size_t k = 0;
    for (int h : hits) k += static_cast<std::size_t>(h);
    ClusterCheckRow row;
    row.check = arch.kind == "coarse" ? "lemma3" : "compiled";
    row.m = arch.m;
    row.tau = arch.tau;
    row.a = st.size;
    row.l = st.perimeter;
    row.bound = arch.kind == "coarse" ? lemma3_bound(st.size, st.perimeter, arch.tau)
                                      : compiled_bound(st.size, st.perimeter, arch.tau);
    row.estimate = estimate_rate(k, trials);
    row.seed = seed;
    return row;
}

/// Single-block Paulis for the Z-type checks: every Pauli that is Z on one qubit, plus a few
/// random non-identity Paulis filling one block, for each block.
inline std::vector<PauliString> single_cell_patterns(std::size_t m, std::size_t tau, std::size_t random_per_cell,
                                                     std::uint64_t seed) {
    GridGeometry g{m * tau, m * tau};
    std::vector<PauliString> out;
    Rng rng = make_rng(seed);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < m; ++c) {
            std::vector<std::size_t> block;
            for (std::size_t i = 0; i < tau; ++i) {
                for (std::size_t j = 0; j < tau; ++j) block.push_back(g.index(r * tau + i, c * tau + j));
            }
            out.push_back(PauliString::single(g.num_qubits(), block.front(), 'Z'));
            for (std::size_t s = 0; s < random_per_cell; ++s) {
                PauliString local = sample_nonidentity_pauli(block.size(), rng);
                PauliString p(g.num_qubits());
                for (std::size_t j = 0; j < block.size(); ++j) {
                    p.xs.set(block[j], local.xs[j]);
                    p.zs.set(block[j], local.zs[j]);
                }
                out.push_back(std::move(p));
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// Random Paulis pulled back through one random t-qubit Clifford.
//
// The ambient string lives on 2t qubits as two independent uniform non-identity blocks
// [0, t) and [t, 2t). The Clifford acts on the window W = [t/2, t/2 + t), straddling both
// blocks like a first-layer gate. Part (a) uses Q = W. Part (b) uses the first k qubits of W
// with identity on the rest of the window.

struct AppendixBRow {
    std::string check;  // "a", "b", "a|K", "b|K", "a-exact", ...
    std::size_t t = 0, k = 0;
    double bound = 0;
    Estimate estimate;
    bool exact = false;
    std::uint64_t seed = 0;

    bool pass() const { return estimate.mean <= bound + 3 * estimate.se; }
};

namespace detail {

/// Q-part of one block conditioned on its outside part: uniform over all Paulis on the inside
/// qubits unless the outside is identity, in which case the inside must be non-identity.
inline void sample_block_inside(PauliString &p, const std::vector<std::size_t> &inside, bool outside_identity, Rng &rng) {
    while (true) {
        bool any = false;
        for (auto q : inside) {
            unsigned v = static_cast<unsigned>(rng() & 3);
            p.xs.set(q, v & 1);
            p.zs.set(q, v >> 1);
            any = any || v;
        }
        if (any || !outside_identity) return;
    }
}

/// Samples the window part of the ambient string. `condition` fixes the complement: 0 draws it
/// at random, 1 fixes it to identity, 2 fixes it to X on every complement qubit.
inline PauliString sample_window_pauli(std::size_t t, std::size_t k, int condition, Rng &rng) {
    std::size_t w0 = t / 2;
    PauliString amb(2 * t);
    for (std::size_t b = 0; b < 2; ++b) {
        std::vector<std::size_t> inside, outside;
        for (std::size_t q = b * t; q < (b + 1) * t; ++q) {
            bool in_q = q >= w0 && q < w0 + k;
            (in_q ? inside : outside).push_back(q);
        }
        if (condition == 0) {
            PauliString blk = sample_nonidentity_pauli(t, rng);
            for (std::size_t j = 0; j < t; ++j) {
                amb.xs.set(b * t + j, blk.xs[j]);
                amb.zs.set(b * t + j, blk.zs[j]);
            }
            continue;
        }
        bool outside_identity = condition == 1 || outside.empty();
        if (inside.empty()) continue;
        sample_block_inside(amb, inside, outside_identity, rng);
    }
    PauliString win(t);
    for (std::size_t j = 0; j < k; ++j) {
        win.xs.set(j, amb.xs[w0 + j]);
        win.zs.set(j, amb.zs[w0 + j]);
    }
    return win;
}

}  // namespace detail

/// Exact Pr[C^dag P C is Z-type] over the whole t-qubit Clifford group for one fixed P.
inline double exact_ztype_probability(const std::vector<CliffordGate> &group, const PauliString &p) {
    std::size_t hits = 0;
    for (const auto &g : group) hits += g.conjugate_inverse(p).is_z_type();
    return static_cast<double>(hits) / static_cast<double>(group.size());
}

/// Checks of the single-Clifford Pauli lemma. For t = 2 the Clifford group is enumerated and part
/// (a) is evaluated exactly, both per non-identity P and under the block distribution. For
/// larger t (and for part (b)) the probabilities are Monte Carlo estimates. The `|K` rows
/// condition on a fixed complementary string.
/// Exhaustive t = 2 rows: the worst single Pauli, and the average over the window law.
inline std::vector<AppendixBRow> appendix_b_exact_t2(std::uint64_t seed = 0) {
    const std::size_t t = 2;
    const double bound_a = 0.25;
    std::vector<AppendixBRow> rows;
    auto group = enumerate_clifford_group(2);
    double worst = 0;
    for (unsigned v = 1; v < 16; ++v) {
        PauliString p(2);
        p.xs.set(0, v & 1);
        p.zs.set(0, (v >> 1) & 1);
        p.xs.set(1, (v >> 2) & 1);
        p.zs.set(1, (v >> 3) & 1);
        worst = std::max(worst, exact_ztype_probability(group, p));
    }
    AppendixBRow r{"a-exact-max", t, t, bound_a, {worst, 0, group.size() * 15}, true, seed};
    rows.push_back(r);

    // Window Pauli law: each block is uniform over its 15 non-identity values.
    double total = 0;
    for (unsigned b0 = 1; b0 < 16; ++b0) {
        for (unsigned b1 = 1; b1 < 16; ++b1) {
            PauliString p(2);
            p.xs.set(0, (b0 >> 2) & 1);  // second qubit of block 0
            p.zs.set(0, (b0 >> 3) & 1);
            p.xs.set(1, b1 & 1);  // first qubit of block 1
            p.zs.set(1, (b1 >> 1) & 1);
            total += exact_ztype_probability(group, p);
        }
    }
    rows.push_back({"a-exact-window", t, t, bound_a, {total / 225.0, 0, group.size() * 225}, true, seed});
    return rows;
}

inline std::vector<AppendixBRow> appendix_b_lemma_checks(std::size_t t, std::size_t trials, std::uint64_t seed,
                                                         std::size_t workers = 0) {
    if (t < 2 || t > 8 || t % 2) throw std::invalid_argument("appendix B checks need even t in [2, 8]");
    std::vector<AppendixBRow> rows;
    double bound_a = std::exp2(-static_cast<double>(t));

    if (t == 2) {
        auto exact = appendix_b_exact_t2(seed);
        rows.insert(rows.end(), exact.begin(), exact.end());
    }

    auto mc = [&](const std::string &name, std::size_t k, int condition, double bound) {
        std::string tag = "appendix-b/" + name + "/t=" + std::to_string(t) + "/k=" + std::to_string(k);
        auto hits = parallel_map<int>(
            trials,
            [&](std::size_t i) {
                Rng rng = trial_rng(seed, tag, i);
                PauliString p = detail::sample_window_pauli(t, k, condition, rng);
                CliffordGate c = sample_uniform_clifford(t, rng);
                return c.conjugate_inverse(p).is_z_type() ? 1 : 0;
            },
            workers);
        std::size_t h = 0;
        for (int x : hits) h += static_cast<std::size_t>(x);
        rows.push_back({name, t, k, bound, estimate_rate(h, trials), false, seed});
    };
    mc("a", t, 0, bound_a);
    mc("a|K=I", t, 1, bound_a);
    mc("a|K=X", t, 2, bound_a);
    for (std::size_t k : {std::size_t{1}, t / 2}) {
        if (k >= t) continue;
        double bound_b = std::exp2(-2.0 * static_cast<double>(k)) + bound_a;
        mc("b", k, 0, bound_b);
        mc("b|K=X", k, 2, bound_b);
    }
    return rows;
}

/// Monte Carlo estimate of E|S| with the Lemma 5 bound and a per-perimeter histogram.
struct ExpectedSReport {
    std::string arch;
    std::size_t m = 0, tau = 0, c_size = 0, trials = 0;
    Estimate mean_size;
    std::size_t nonempty = 0;
    double bound = 0;
    bool in_regime = false;  // tau >= sqrt(1000 log2 m)
    SamplerPolicy policy = SamplerPolicy::Uniform;
    /// Estimated E|{s in S : Per = l}|, keyed by l. Members are enumerated when S has at most
    /// 2^10 elements and sampled otherwise.
    std::map<std::size_t, double> perimeter_hist;
    std::uint64_t seed = 0;

    bool informational() const { return !in_regime || bound >= 1; }
    /// Markov: Pr[S nonempty] <= E|S|, so with `trials` draws the expected count is at most
    /// trials * bound.
    double markov_count_limit() const { return static_cast<double>(trials) * bound; }
    bool pass() const { return informational() || mean_size.mean <= bound + 3 * mean_size.se; }
    /// Perimeters l >= 1 whose histogram value exceeds the per-perimeter bound.
    std::vector<std::size_t> lemma4_violations() const {
        std::vector<std::size_t> out;
        for (auto [l, v] : perimeter_hist) {
            if (l > 0 && v > lemma4_bound(l, m, tau)) out.push_back(l);
        }
        return out;
    }
};

namespace detail {

/// Members of S as unsigned Paulis D Z(s) D^dag, at most `cap` of them (all if |S| <= cap).
inline std::vector<PauliString> s_members(const StabilizerRows &rows, const Tripartition &part, std::size_t cap, Rng &rng) {
    std::size_t n = rows.num_qubits(), w = rows.words_per_half();
    std::size_t a = part.A[0];
    std::vector<word_t> not_a(w, 0), in_c(w, 0);
    for (auto q : part.B) set_bit(not_a.data(), q, true);
    for (auto q : part.C) {
        set_bit(not_a.data(), q, true);
        set_bit(in_c.data(), q, true);
    }
    // Payload: 2 bits for the A-part followed by n bits recording the combination.
    std::size_t pbits = 2 + n, pw = words_for(pbits);
    EchelonBasis basis(2 * w * kWordBits, pbits);
    std::vector<word_t> row(2 * w), payload(pw);
    std::vector<std::vector<word_t>> nulls;
    for (std::size_t q = 0; q < n; ++q) {
        const word_t *x = rows.xrow(q), *z = rows.zrow(q);
        for (std::size_t i = 0; i < w; ++i) {
            row[i] = x[i] & not_a[i];
            row[w + i] = z[i] & in_c[i];
        }
        std::fill(payload.begin(), payload.end(), 0);
        set_bit(payload.data(), 0, get_bit(x, a));
        set_bit(payload.data(), 1, get_bit(z, a));
        set_bit(payload.data(), 2 + q, true);
        if (!basis.insert(row.data(), payload.data())) nulls.push_back(payload);
    }
    auto ap = [](const std::vector<word_t> &p) { return p[0] & 3; };
    std::vector<word_t> base;
    for (const auto &v : nulls) {
        if (ap(v)) {
            base = v;
            break;
        }
    }
    if (base.empty()) return {};
    // Kernel of the A-payload map within the null space.
    std::vector<std::vector<word_t>> kernel;
    for (const auto &v : nulls) {
        auto u = v;
        if (ap(u)) {
            if (ap(u) != ap(base)) throw std::logic_error("H spans two distinct Paulis on A");
            xor_words(u.data(), base.data(), pw);
        }
        bool nonzero = false;
        for (auto x : u) nonzero = nonzero || x;
        if (nonzero) kernel.push_back(std::move(u));
    }
    EchelonBasis kb(pbits, 0);
    std::vector<std::vector<word_t>> indep;
    for (auto &u : kernel) {
        auto tmp = u;
        word_t dummy = 0;
        if (kb.insert(tmp.data(), &dummy)) indep.push_back(u);
    }
    auto to_pauli = [&](const std::vector<word_t> &comb) {
        PauliString p(n);
        for (std::size_t q = 0; q < n; ++q) {
            if (!get_bit(comb.data(), 2 + q)) continue;
            p.multiply_right(rows.row(q));
        }
        p.sign = false;
        return p;
    };
    std::vector<PauliString> out;
    std::size_t dim = indep.size();
    bool enumerate = dim < 64 && (std::size_t{1} << dim) <= cap;
    std::size_t count = enumerate ? (std::size_t{1} << dim) : cap;
    for (std::size_t i = 0; i < count; ++i) {
        auto comb = base;
        for (std::size_t j = 0; j < dim; ++j) {
            bool take = enumerate ? ((i >> j) & 1) : (rng() & 1);
            if (take) xor_words(comb.data(), indep[j].data(), pw);
        }
        out.push_back(to_pauli(comb));
    }
    return out;
}

}  // namespace detail

inline ExpectedSReport expected_S_bound_mc(const ArchitectureSpec &arch, const Tripartition &part, std::size_t trials,
                                           std::uint64_t seed, SamplerPolicy policy = SamplerPolicy::Uniform,
                                           std::size_t workers = 0) {
    if (arch.kind != "coarse") throw std::invalid_argument("expected |S| bound applies to the coarse architecture");
    auto tmpl = arch.build();
    part.validate(tmpl.num_qubits());
    constexpr std::size_t kMemberCap = 1024;
    std::string tag = "expected-s/" + arch.label();
    struct Trial {
        double size = 0;
        double weight = 0;
        std::vector<std::size_t> perims;
    };
    auto results = parallel_map<Trial>(
        trials,
        [&](std::size_t i) {
            auto c = instantiate(tmpl, policy, trial_seed(seed, tag, i));
            auto rows = stabilizer_rows(c);
            Trial tr;
            SSetSummary s = compute_S(rows, part);
            tr.size = s.total();
            if (s.is_empty()) return tr;
            Rng rng = trial_rng(seed, tag + "/members", i);
            auto members = detail::s_members(rows, part, kMemberCap, rng);
            tr.weight = tr.size / static_cast<double>(members.size());
            for (const auto &p : members) tr.perims.push_back(stats_of(cluster_of(p, arch.m, arch.tau)).perimeter);
            return tr;
        },
        workers);
    ExpectedSReport rep;
    rep.arch = arch.label();
    rep.m = arch.m;
    rep.tau = arch.tau;
    rep.c_size = part.C.size();
    rep.trials = trials;
    rep.policy = policy;
    rep.seed = seed;
    rep.bound = lemma5_bound(part.C.size(), arch.tau);
    rep.in_regime = lemma5_regime(arch.m, arch.tau);
    std::vector<double> sizes;
    for (const auto &tr : results) {
        sizes.push_back(tr.size);
        rep.nonempty += tr.size > 0;
        for (auto l : tr.perims) rep.perimeter_hist[l] += tr.weight / static_cast<double>(trials);
    }
    rep.mean_size = estimate_mean(sizes);
    return rep;
}

}  // namespace miesim

#endif
