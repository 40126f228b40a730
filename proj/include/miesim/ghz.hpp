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

#ifndef MIESIM_GHZ_HPP
#define MIESIM_GHZ_HPP

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "miesim/architectures.hpp"
#include "miesim/circuit.hpp"
#include "miesim/clifford_sampling.hpp"
#include "miesim/parallel.hpp"
#include "miesim/stats.hpp"

namespace miesim {

using Triple = std::array<std::size_t, 3>;

inline void check_triple(const Triple &t, std::size_t n) {
    if (t[0] == t[1] || t[0] == t[2] || t[1] == t[2]) throw std::invalid_argument("triple entries must be distinct");
    for (auto q : t) {
        if (q >= n) throw std::invalid_argument("triple entry out of range");
    }
}

/// Uniform over unordered triples of distinct qubits, returned sorted.
inline Triple sample_triple(std::size_t n, Rng &rng) {
    if (n < 3) throw std::invalid_argument("need at least three qubits");
    Triple t;
    t[0] = uniform_below(rng, n);
    do t[1] = uniform_below(rng, n);
    while (t[1] == t[0]);
    do t[2] = uniform_below(rng, n);
    while (t[2] == t[0] || t[2] == t[1]);
    std::sort(t.begin(), t.end());
    return t;
}

/// Measures every qubit outside the triple and returns the pure state left on it.
inline StabilizerTableau postmeasurement_triple_state(StabilizerTableau state, const Triple &t, Rng &rng) {
    std::size_t n = state.num_qubits();
    check_triple(t, n);
    for (std::size_t q = 0; q < n; ++q) {
        if (q != t[0] && q != t[1] && q != t[2]) state.measure_z(q, rng);
    }
    return state.reduced_pure_state({t[0], t[1], t[2]});
}

inline StabilizerTableau postmeasurement_triple_state(const CliffordCircuit &c, const Triple &t, Rng &rng) {
    return postmeasurement_triple_state(run_circuit(c), t, rng);
}

/// GHZ-type: every single-qubit reduced state is maximally mixed.
inline bool is_ghz_type(const StabilizerTableau &s) {
    if (s.num_qubits() != 3) throw std::invalid_argument("GHZ-type test needs a 3-qubit state");
    for (std::size_t q = 0; q < 3; ++q) {
        if (!(s.region_purity({q}) == Dyadic::make(1, 1))) return false;
    }
    return true;
}

/// Unsigned stabilizer group that the triple carries after every other qubit is measured.
///
/// The measured generators are the elements of the group that are Z-type on the measured
/// qubits; their restrictions to the triple do not depend on the outcomes except for signs.
inline std::vector<PauliString> triple_group_unsigned(const StabilizerRows &rows, const Triple &t) {
    std::size_t n = rows.num_qubits(), w = rows.words_per_half();
    check_triple(t, n);
    std::vector<word_t> keep(w, ~word_t{0});
    if (n % 64) keep[w - 1] = (word_t{1} << (n % 64)) - 1;
    for (auto q : t) set_bit(keep.data(), q, false);
    EchelonBasis basis(w * kWordBits, 6);
    std::vector<word_t> row(w);
    std::vector<PauliString> gens;
    EchelonBasis span(6, 0);
    for (std::size_t q = 0; q < n; ++q) {
        const word_t *x = rows.xrow(q), *z = rows.zrow(q);
        for (std::size_t i = 0; i < w; ++i) row[i] = x[i] & keep[i];
        word_t payload = 0;
        for (std::size_t j = 0; j < 3; ++j) {
            payload |= static_cast<word_t>(get_bit(x, t[j])) << j;
            payload |= static_cast<word_t>(get_bit(z, t[j])) << (3 + j);
        }
        if (basis.insert(row.data(), &payload) || payload == 0) continue;
        word_t reduced = payload;
        if (!span.insert(&reduced, nullptr)) continue;
        PauliString p(3);
        for (std::size_t j = 0; j < 3; ++j) {
            p.xs.set(j, (payload >> j) & 1);
            p.zs.set(j, (payload >> (3 + j)) & 1);
        }
        gens.push_back(std::move(p));
    }
    return gens;
}

/// GHZ-type test on a set of generators of a 3-qubit stabilizer group, signs ignored:
/// no group element is supported on a single qubit.
inline bool is_ghz_type_group(const std::vector<PauliString> &gens) {
    std::size_t k = gens.size();
    if (k > 16) throw std::invalid_argument("too many generators");
    for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
        PauliString p(3);
        for (std::size_t i = 0; i < k; ++i) {
            if (mask >> i & 1) {
                p.xs ^= gens[i].xs;
                p.zs ^= gens[i].zs;
            }
        }
        if (p.weight() == 1) return false;
    }
    return true;
}

/// Local Cliffords that map a state exactly onto the GHZ group <+XXX, +ZZI, +IZZ>.
struct GhzWitness {
    std::array<CliffordGate, 3> gates;
};

inline StabilizerTableau ghz3_state() {
    return StabilizerTableau::from_stabilizers(
        {PauliString::from_string("+XXX"), PauliString::from_string("+ZZI"), PauliString::from_string("+IZZ")});
}

inline StabilizerTableau apply_local(StabilizerTableau s, const std::array<CliffordGate, 3> &gates) {
    for (std::size_t q = 0; q < 3; ++q) s.apply_gate(gates[q], std::vector<std::size_t>{q});
    return s;
}

/// Searches the 24^3 local Clifford combinations. Pairs (C_h, C_i) are pruned by requiring the
/// pulled-back +ZZI to lie in the state's group before trying C_j.
inline std::optional<GhzWitness> ghz_witness(const StabilizerTableau &s) {
    if (s.num_qubits() != 3) throw std::invalid_argument("witness search needs a 3-qubit state");
    if (!is_ghz_type(s)) return std::nullopt;
    auto group = enumerate_clifford_group(1);
    const PauliString z = PauliString::from_string("+Z"), x = PauliString::from_string("+X");
    auto pulled = [](const CliffordGate &g, const PauliString &p) { return g.conjugate_inverse(p); };
    auto in_group = [&](const std::array<PauliString, 3> &f) {
        PauliString p(3);
        p.sign = f[0].sign ^ f[1].sign ^ f[2].sign;
        for (std::size_t q = 0; q < 3; ++q) {
            p.xs.set(q, f[q].xs[0]);
            p.zs.set(q, f[q].zs[0]);
        }
        auto sign = s.stabilizer_sign_of(p);
        return sign && !*sign;
    };
    const PauliString id = PauliString::from_string("+I");
    for (const auto &a : group) {
        for (const auto &b : group) {
            if (!in_group({pulled(a, z), pulled(b, z), id})) continue;
            for (const auto &c : group) {
                if (!in_group({id, pulled(b, z), pulled(c, z)})) continue;
                if (!in_group({pulled(a, x), pulled(b, x), pulled(c, x)})) continue;
                GhzWitness w{{a, b, c}};
                if (!apply_local(s, w.gates).same_state(ghz3_state())) throw std::logic_error("witness verification failed");
                return w;
            }
        }
    }
    return std::nullopt;
}

/// Graph state with per-vertex local Cliffords: the state is (prod_v corrections[v]) |G>.
/// Vertices carry labels so that removing one keeps the others identifiable.
struct GraphState {
    std::vector<std::size_t> labels;
    std::vector<std::vector<bool>> adj;
    std::vector<CliffordGate> corrections;

    std::size_t size() const { return labels.size(); }

    static GraphState from_adjacency(std::vector<std::vector<bool>> adj) {
        GraphState g;
        std::size_t n = adj.size();
        for (std::size_t v = 0; v < n; ++v) {
            if (adj[v].size() != n || adj[v][v]) throw std::invalid_argument("adjacency must be square with zero diagonal");
            for (std::size_t u = 0; u < n; ++u) {
                if (adj[v][u] != adj[u][v]) throw std::invalid_argument("adjacency must be symmetric");
            }
            g.labels.push_back(v);
            g.corrections.push_back(CliffordGate::identity(1));
        }
        g.adj = std::move(adj);
        return g;
    }

    std::size_t index_of(std::size_t label) const {
        auto it = std::find(labels.begin(), labels.end(), label);
        if (it == labels.end()) throw std::invalid_argument("vertex " + std::to_string(label) + " not in graph");
        return static_cast<std::size_t>(it - labels.begin());
    }

    bool connected() const {
        std::size_t n = size();
        if (n == 0) return true;
        std::vector<bool> seen(n, false);
        std::vector<std::size_t> stack{0};
        seen[0] = true;
        std::size_t count = 1;
        while (!stack.empty()) {
            auto v = stack.back();
            stack.pop_back();
            for (std::size_t u = 0; u < n; ++u) {
                if (adj[v][u] && !seen[u]) {
                    seen[u] = true;
                    ++count;
                    stack.push_back(u);
                }
            }
        }
        return count == n;
    }

    /// Generators g_v = X_v prod_{u ~ v} Z_u of the bare graph state.
    std::vector<PauliString> graph_generators() const {
        std::size_t n = size();
        std::vector<PauliString> g;
        for (std::size_t v = 0; v < n; ++v) {
            PauliString p(n);
            p.xs.set(v);
            for (std::size_t u = 0; u < n; ++u) {
                if (adj[v][u]) p.zs.set(u);
            }
            g.push_back(std::move(p));
        }
        return g;
    }

    StabilizerTableau to_tableau() const {
        auto t = StabilizerTableau::from_stabilizers(graph_generators());
        for (std::size_t v = 0; v < size(); ++v) t.apply_gate(corrections[v], std::vector<std::size_t>{v});
        return t;
    }
};

/// Local-Clifford reduction of a stabilizer state to graph form.
inline GraphState to_graph_state(const StabilizerTableau &state) {
    std::size_t n = state.num_qubits();
    auto H = CliffordGate::named("H"), Sd = CliffordGate::named("S_DAG"), Z = CliffordGate::named("Z");
    std::vector<CliffordGate> applied(n, CliffordGate::identity(1));
    auto stabs = state.stabilizers();
    auto conj_all = [&](const CliffordGate &g, std::size_t q) {
        applied[q] = applied[q].then(g);
        for (auto &s : stabs) g.apply_to(s, std::vector<std::size_t>{q});
    };

    // Hadamard every qubit outside the pivots of the X-part; this makes the X-part invertible.
    GF2Matrix xpart(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t q = 0; q < n; ++q) xpart.set(r, q, stabs[r].xs[q]);
    auto piv = xpart.rref();
    std::vector<bool> is_pivot(n, false);
    for (auto p : piv) is_pivot[p] = true;
    for (std::size_t q = 0; q < n; ++q) {
        if (!is_pivot[q]) conj_all(H, q);
    }

    // Row-reduce with signed products until the X-part is the identity.
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t r = col;
        while (r < n && !stabs[r].xs[col]) ++r;
        if (r == n) throw std::logic_error("X-part is singular after Hadamards");
        std::swap(stabs[r], stabs[col]);
        for (std::size_t o = 0; o < n; ++o) {
            if (o != col && stabs[o].xs[col]) {
                if (stabs[o].multiply_right(stabs[col])) throw std::logic_error("stabilizers anticommute");
            }
        }
    }
    for (std::size_t v = 0; v < n; ++v) {
        if (stabs[v].zs[v]) conj_all(Sd, v);  // Y_v -> X_v
    }
    for (std::size_t v = 0; v < n; ++v) {
        if (stabs[v].sign) conj_all(Z, v);  // flips only g_v
    }

    GraphState g;
    g.adj.assign(n, std::vector<bool>(n, false));
    for (std::size_t v = 0; v < n; ++v) {
        g.labels.push_back(v);
        for (std::size_t u = 0; u < n; ++u) g.adj[v][u] = stabs[v].zs[u];
        g.corrections.push_back(applied[v].inverse());
    }
    return g;
}

/// Z measurement of graph vertex v (on the bare graph state, before its local correction).
/// The vertex is removed; outcome 1 adds Z to every former neighbour.
inline GraphState measure_graph_vertex_z(const GraphState &g, std::size_t label, bool outcome) {
    std::size_t v = g.index_of(label);
    GraphState out;
    auto Z = CliffordGate::named("Z");
    std::vector<std::size_t> keep;
    for (std::size_t u = 0; u < g.size(); ++u) {
        if (u != v) keep.push_back(u);
    }
    out.adj.assign(keep.size(), std::vector<bool>(keep.size(), false));
    for (std::size_t i = 0; i < keep.size(); ++i) {
        std::size_t u = keep[i];
        out.labels.push_back(g.labels[u]);
        for (std::size_t j = 0; j < keep.size(); ++j) out.adj[i][j] = g.adj[u][keep[j]];
        out.corrections.push_back(outcome && g.adj[v][u] ? Z.then(g.corrections[u]) : g.corrections[u]);
    }
    return out;
}

/// Labels of three vertices inducing a connected subgraph: a vertex of degree >= 2 and two of
/// its neighbours.
inline Triple ghz_triple_from_connected_graph(const GraphState &g) {
    if (g.size() < 3) throw std::invalid_argument("graph needs at least three vertices");
    if (!g.connected()) throw std::invalid_argument("graph is not connected");
    for (std::size_t v = 0; v < g.size(); ++v) {
        std::vector<std::size_t> nb;
        for (std::size_t u = 0; u < g.size() && nb.size() < 2; ++u) {
            if (g.adj[v][u]) nb.push_back(u);
        }
        if (nb.size() == 2) {
            Triple t{g.labels[v], g.labels[nb[0]], g.labels[nb[1]]};
            std::sort(t.begin(), t.end());
            return t;
        }
    }
    throw std::logic_error("connected graph on >= 3 vertices without a degree-2 vertex");
}

/// Connected graph on n vertices: each edge present with probability 1/3, redrawn until connected.
inline GraphState random_connected_graph(std::size_t n, Rng &rng) {
    while (true) {
        std::vector<std::vector<bool>> a(n, std::vector<bool>(n, false));
        for (std::size_t u = 0; u < n; ++u)
            for (std::size_t v = u + 1; v < n; ++v)
                if (uniform_below(rng, 3) == 0) a[u][v] = a[v][u] = true;
        auto g = GraphState::from_adjacency(std::move(a));
        if (g.connected()) return g;
    }
}

struct Lemma6Report {
    std::size_t graphs = 0, outcome_strings = 0, failures = 0;
    bool pass() const { return graphs > 0 && failures == 0; }
};

/// For random connected graphs, measures every vertex outside the chosen triple for every
/// outcome string. A string fails unless both the graph rule and the tableau leave the triple
/// GHZ-type.
inline Lemma6Report lemma6_check(std::size_t graphs, std::size_t min_vertices, std::size_t max_vertices,
                                 std::uint64_t seed) {
    if (min_vertices < 3 || max_vertices < min_vertices || max_vertices > 20) {
        throw std::invalid_argument("graph sizes must satisfy 3 <= min <= max <= 20");
    }
    Lemma6Report r;
    for (std::size_t i = 0; i < graphs; ++i) {
        Rng rng = trial_rng(seed, "lemma6", i);
        std::size_t n = min_vertices + uniform_below(rng, max_vertices - min_vertices + 1);
        GraphState g = random_connected_graph(n, rng);
        Triple t = ghz_triple_from_connected_graph(g);
        std::vector<std::size_t> others;
        for (std::size_t v = 0; v < n; ++v)
            if (v != t[0] && v != t[1] && v != t[2]) others.push_back(v);
        for (std::uint64_t x = 0; x < (std::uint64_t{1} << others.size()); ++x) {
            GraphState h = g;
            auto tab = g.to_tableau();
            bool ok = true;
            for (std::size_t k = 0; k < others.size(); ++k) {
                bool bit = (x >> k) & 1;
                h = measure_graph_vertex_z(h, others[k], bit);
                ok = ok && tab.force_measure_z(others[k], bit) > 0;
            }
            ok = ok && is_ghz_type(h.to_tableau()) && is_ghz_type(tab.reduced_pure_state({t[0], t[1], t[2]}));
            ++r.outcome_strings;
            r.failures += !ok;
        }
        ++r.graphs;
    }
    return r;
}

struct GhzScanResult {
    std::string arch;
    std::size_t trials = 0;
    std::size_t hits = 0;
    Estimate rate;
    std::uint64_t seed = 0;
};

/// Per trial: a fresh circuit, a uniform triple, and the GHZ-type test on the post-measurement
/// group of the triple (unsigned route).
inline GhzScanResult ghz_scan(const ArchitectureSpec &arch, std::size_t trials, std::uint64_t seed,
                              SamplerPolicy policy = SamplerPolicy::Uniform, std::size_t workers = 0) {
    auto tmpl = arch.build();
    std::string tag = "ghz-scan/" + arch.label();
    auto hit = parallel_map<int>(
        trials,
        [&](std::size_t i) {
            auto c = instantiate(tmpl, policy, trial_seed(seed, tag, i));
            Rng rng = trial_rng(seed, tag + "/triple", i);
            Triple t = sample_triple(tmpl.num_qubits(), rng);
            return is_ghz_type_group(triple_group_unsigned(stabilizer_rows(c), t)) ? 1 : 0;
        },
        workers);
    GhzScanResult r;
    r.arch = arch.label();
    r.trials = trials;
    for (int h : hit) r.hits += static_cast<std::size_t>(h);
    r.rate = estimate_rate(r.hits, trials);
    r.seed = seed;
    return r;
}

}  // namespace miesim

#endif
