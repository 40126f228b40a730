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


// Gate-by-gate sampler for 2D circuits over CNOT + single-qubit unitaries. Each single-qubit
// gate resamples one output bit from its conditional distribution given only the bits in a
// side-L square around it. Includes the exact output law of the sampler, the error bound in
// terms of conditional purities, the purity/fidelity identity and a parallel schedule planner.

#ifndef MIESIM_GATE_BY_GATE_HPP
#define MIESIM_GATE_BY_GATE_HPP

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "miesim/circuit_io.hpp"
#include "miesim/dense.hpp"
#include "miesim/mie.hpp"
#include "miesim/parallel.hpp"
#include "miesim/rng.hpp"
#include "miesim/stats.hpp"

namespace miesim {

struct GbgGate {
    enum class Kind { Cnot, U1 };
    Kind kind = Kind::U1;
    std::size_t q0 = 0;  // control, or the U1 qubit
    std::size_t q1 = 0;  // target
    DenseMatrix u{2};    // U1 only

    std::vector<std::size_t> support() const {
        return kind == Kind::Cnot ? std::vector<std::size_t>{q0, q1} : std::vector<std::size_t>{q0};
    }
};

inline const DenseMatrix &cnot_matrix() {
    static const DenseMatrix m = [] {
        DenseMatrix c(4);
        c(0, 0) = 1;
        c(2, 2) = 1;
        c(3, 1) = 1;
        c(1, 3) = 1;
        return c;
    }();
    return m;
}

struct GbgCircuit {
    GridGeometry grid;
    std::vector<GbgGate> gates;

    std::size_t num_qubits() const { return grid.num_qubits(); }

    void add_cnot(std::size_t control, std::size_t target) {
        GbgGate g;
        g.kind = GbgGate::Kind::Cnot;
        g.q0 = control;
        g.q1 = target;
        gates.push_back(std::move(g));
    }
    void add_u1(std::size_t q, const DenseMatrix &u) {
        GbgGate g;
        g.q0 = q;
        g.u = u;
        gates.push_back(std::move(g));
    }

    /// Indices of the single-qubit gates.
    std::vector<std::size_t> gamma() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < gates.size(); ++i) {
            if (gates[i].kind == GbgGate::Kind::U1) out.push_back(i);
        }
        return out;
    }

    /// Earliest layer of each gate given the gate order.
    std::vector<std::size_t> layers() const {
        std::vector<std::size_t> next(num_qubits(), 0), out;
        for (const auto &g : gates) {
            std::size_t l = 0;
            for (auto q : g.support()) l = std::max(l, next[q]);
            for (auto q : g.support()) next[q] = l + 1;
            out.push_back(l);
        }
        return out;
    }

    void validate() const {
        for (std::size_t i = 0; i < gates.size(); ++i) {
            const auto &g = gates[i];
            std::string at = "gate " + std::to_string(i);
            for (auto q : g.support()) {
                if (q >= num_qubits()) throw std::invalid_argument(at + ": qubit out of range");
            }
            if (g.kind == GbgGate::Kind::Cnot) {
                if (g.q0 == g.q1) throw std::invalid_argument(at + ": CNOT control equals target");
                if (grid.distance(g.q0, g.q1) != 1 || (grid.row(g.q0) != grid.row(g.q1) && grid.col(g.q0) != grid.col(g.q1))) {
                    throw std::invalid_argument(at + ": CNOT qubits are not grid neighbours");
                }
            } else if (g.u.dim != 2 || g.u.unitarity_error() > kUnitarityTol) {
                throw std::invalid_argument(at + ": single-qubit gate is not a 2x2 unitary");
            }
        }
    }
};

/// Haar-random single-qubit unitary.
inline DenseMatrix haar_u1(Rng &rng) {
    std::normal_distribution<double> nd;
    cplx a(nd(rng), nd(rng)), b(nd(rng), nd(rng));
    double r = std::sqrt(std::norm(a) + std::norm(b));
    a /= r;
    b /= r;
    DenseMatrix u(2);
    u(0, 0) = a;
    u(0, 1) = -std::conj(b);
    u(1, 0) = b;
    u(1, 1) = std::conj(a);
    return u;
}

/// The Clifford gate of a 2x2 unitary, when it is one.
inline std::optional<CliffordGate> u1_as_clifford(const DenseMatrix &u) {
    auto conj_by = [&](char p) -> std::optional<PauliString> {
        PauliString in(1);
        in.set(0, p);
        DenseMatrix pm(2);
        for (std::size_t c = 0; c < 2; ++c) {
            std::vector<cplx> e(2, 0);
            e[c] = 1;
            auto col = apply_pauli(e, in);
            pm(0, c) = col[0];
            pm(1, c) = col[1];
        }
        DenseMatrix m(2);
        for (std::size_t i = 0; i < 2; ++i) {
            for (std::size_t j = 0; j < 2; ++j) {
                cplx s = 0;
                for (std::size_t k = 0; k < 2; ++k) {
                    for (std::size_t l = 0; l < 2; ++l) s += u(i, k) * pm(k, l) * std::conj(u(j, l));
                }
                m(i, j) = s;
            }
        }
        for (char c : {'X', 'Y', 'Z'}) {
            for (bool neg : {false, true}) {
                PauliString cand(1);
                cand.set(0, c);
                cand.sign = neg;
                double err = 0;
                for (std::size_t col = 0; col < 2; ++col) {
                    std::vector<cplx> e(2, 0);
                    e[col] = 1;
                    auto v = apply_pauli(e, cand);
                    err = std::max({err, std::abs(v[0] - m(0, col)), std::abs(v[1] - m(1, col))});
                }
                if (err < 1e-9) return cand;
            }
        }
        return std::nullopt;
    };
    auto x = conj_by('X'), z = conj_by('Z');
    if (!x || !z) return std::nullopt;
    return CliffordGate::from_images({*x}, {*z});
}

/// Single-qubit Clifford as a GbgCircuit unitary.
inline DenseMatrix u1_from_clifford(const CliffordGate &g) {
    if (g.num_qubits() != 1) throw std::invalid_argument("expected a single-qubit gate");
    return clifford_matrix(g);
}

enum class GbgBackend { DenseLightcone, CliffordExact };

struct GbgConfig {
    std::size_t L = 1;  // shield side, odd
    GbgBackend backend = GbgBackend::DenseLightcone;
    std::size_t lightcone_cap = kDenseCap;
    /// Condition on every other bit (q in place of q-tilde). The sampler is then exact.
    bool exact_conditionals = false;

    void validate() const {
        if (L == 0 || L % 2 == 0) throw std::invalid_argument("shield side L must be odd and >= 1");
        if (lightcone_cap == 0 || lightcone_cap > kDenseCap) throw std::invalid_argument("lightcone cap must be in [1, 20]");
    }
};

/// Square_L(a) without a itself, clipped to the grid.
inline std::vector<std::size_t> shield_of(const GridGeometry &g, std::size_t a, std::size_t L) {
    std::vector<std::size_t> b;
    for (std::size_t q = 0; q < g.num_qubits(); ++q) {
        if (q != a && g.distance(q, a) <= L / 2) b.push_back(q);
    }
    return b;
}

/// Gates [0, t) restricted to the backward lightcone of `targets`, run densely on the lightcone
/// qubits. Returns the state and the lightcone qubits (local index i is qubits[i]).
inline std::pair<DenseState, std::vector<std::size_t>> lightcone_state(const GbgCircuit &c, std::size_t t,
                                                                       const std::vector<std::size_t> &targets,
                                                                       std::size_t cap = kDenseCap) {
    std::vector<bool> in(c.num_qubits(), false);
    for (auto q : targets) in.at(q) = true;
    std::vector<std::size_t> kept;
    for (std::size_t i = t; i-- > 0;) {
        auto s = c.gates[i].support();
        bool touch = false;
        for (auto q : s) touch = touch || in[q];
        if (!touch) continue;
        for (auto q : s) in[q] = true;
        kept.push_back(i);
    }
    // Targets first, in their given order, so callers can address them by position.
    std::vector<std::size_t> qubits = targets;
    std::vector<bool> listed(c.num_qubits(), false);
    for (auto q : targets) listed[q] = true;
    for (std::size_t q = 0; q < c.num_qubits(); ++q) {
        if (in[q] && !listed[q]) qubits.push_back(q);
    }
    if (qubits.size() > cap) {
        throw std::length_error("lightcone of " + std::to_string(qubits.size()) + " qubits exceeds the cap of " +
                                std::to_string(cap));
    }
    std::vector<std::size_t> local(c.num_qubits(), 0);
    for (std::size_t i = 0; i < qubits.size(); ++i) local[qubits[i]] = i;
    DenseState s(qubits.size(), cap);
    for (std::size_t k = kept.size(); k-- > 0;) {
        const auto &g = c.gates[kept[k]];
        if (g.kind == GbgGate::Kind::Cnot) {
            apply_unitary(s, cnot_matrix(), {local[g.q0], local[g.q1]});
        } else {
            apply_unitary(s, g.u, {local[g.q0]});
        }
    }
    return {std::move(s), std::move(qubits)};
}

/// Tableau of the state after the first t gates; every gate must be Clifford.
inline StabilizerTableau clifford_prefix_tableau(const GbgCircuit &c, std::size_t t) {
    auto tab = StabilizerTableau::new_zero_state(c.num_qubits());
    static const CliffordGate cnot = CliffordGate::named("CNOT");
    for (std::size_t i = 0; i < t; ++i) {
        const auto &g = c.gates[i];
        if (g.kind == GbgGate::Kind::Cnot) {
            tab.apply_gate(cnot, std::vector<std::size_t>{g.q0, g.q1});
        } else {
            auto cg = u1_as_clifford(g.u);
            if (!cg) throw std::invalid_argument("gate " + std::to_string(i) + " is not Clifford");
            tab.apply_gate(*cg, std::vector<std::size_t>{g.q0});
        }
    }
    return tab;
}

namespace detail {

/// (Pr[a=0, x_B], Pr[a=1, x_B]) from a tableau by forced measurement.
inline std::array<double, 2> joint_from_tableau(StabilizerTableau tab, std::size_t a, const std::vector<std::size_t> &b,
                                                const std::vector<std::uint8_t> &xb) {
    double p = 1;
    for (std::size_t j = 0; j < b.size() && p > 0; ++j) p *= tab.force_measure_z(b[j], xb[j]);
    if (p == 0) return {0, 0};
    if (auto det = tab.peek_z(a)) return *det ? std::array<double, 2>{0, p} : std::array<double, 2>{p, 0};
    return {p / 2, p / 2};
}

/// Same joint probabilities from a dense state whose first 1 + |B| local qubits are a, B.
inline std::array<double, 2> joint_from_dense(const DenseState &s, const std::vector<std::uint8_t> &xb) {
    std::size_t nb = xb.size(), want = 0, mask = 0;
    for (std::size_t j = 0; j < nb; ++j) {
        mask |= std::size_t{1} << (j + 1);
        want |= std::size_t{xb[j]} << (j + 1);
    }
    std::array<double, 2> out{0, 0};
    const auto &amp = s.amplitudes();
    for (std::size_t i = 0; i < amp.size(); ++i) {
        if ((i & mask) == want) out[i & 1] += std::norm(amp[i]);
    }
    return out;
}

}  // namespace detail

/// Conditional law of the bit of A after the first t gates, given x_B. Nullopt when
/// Pr[x_B] = 0.
inline std::optional<std::array<double, 2>> conditional_dist(const GbgCircuit &c, std::size_t t, std::size_t a,
                                                             const std::vector<std::size_t> &b,
                                                             const std::vector<std::uint8_t> &xb, GbgBackend backend,
                                                             std::size_t cap = kDenseCap) {
    if (t > c.gates.size()) throw std::out_of_range("prefix longer than the circuit");
    if (xb.size() != b.size()) throw std::invalid_argument("x_B length does not match B");
    std::array<double, 2> j;
    if (backend == GbgBackend::CliffordExact) {
        j = detail::joint_from_tableau(clifford_prefix_tableau(c, t), a, b, xb);
    } else {
        std::vector<std::size_t> targets{a};
        targets.insert(targets.end(), b.begin(), b.end());
        j = detail::joint_from_dense(lightcone_state(c, t, targets, cap).first, xb);
    }
    double pb = j[0] + j[1];
    if (pb <= 1e-14) return std::nullopt;
    return std::array<double, 2>{j[0] / pb, j[1] / pb};
}

using Bits = std::vector<std::uint8_t>;

inline std::size_t pack_bits(const Bits &x) {
    if (x.size() > 63) throw std::length_error("bit string too long to pack");
    std::size_t v = 0;
    for (std::size_t i = 0; i < x.size(); ++i) v |= std::size_t{x[i]} << i;
    return v;
}

inline std::string bits_string(const Bits &x) {
    std::string s;
    for (auto b : x) s.push_back(b ? '1' : '0');
    return s;
}

/// Gate-by-gate sampler with the conditional of every single-qubit step prepared up front, so
/// sampling is read-only and can run on several threads.
class GbgSampler {
   public:
    GbgSampler(const GbgCircuit &c, const GbgConfig &cfg) : c_(c), cfg_(cfg) {
        c.validate();
        cfg.validate();
        std::optional<StabilizerTableau> running;
        if (cfg.backend == GbgBackend::CliffordExact) running = StabilizerTableau::new_zero_state(c.num_qubits());
        static const CliffordGate cnot = CliffordGate::named("CNOT");
        steps_.resize(c.gates.size());
        for (std::size_t i = 0; i < c.gates.size(); ++i) {
            const auto &g = c.gates[i];
            if (running) {
                if (g.kind == GbgGate::Kind::Cnot) {
                    running->apply_gate(cnot, std::vector<std::size_t>{g.q0, g.q1});
                } else {
                    auto cg = u1_as_clifford(g.u);
                    if (!cg) throw std::invalid_argument("gate " + std::to_string(i) + " is not Clifford");
                    running->apply_gate(*cg, std::vector<std::size_t>{g.q0});
                }
            }
            if (g.kind != GbgGate::Kind::U1) continue;
            Step &st = steps_[i];
            st.a = g.q0;
            if (cfg.exact_conditionals) {
                for (std::size_t q = 0; q < c.num_qubits(); ++q) {
                    if (q != g.q0) st.b.push_back(q);
                }
            } else {
                st.b = shield_of(c.grid, g.q0, cfg.L);
            }
            if (running) {
                st.tab = *running;
                continue;
            }
            std::vector<std::size_t> targets{st.a};
            targets.insert(targets.end(), st.b.begin(), st.b.end());
            auto [state, qubits] = lightcone_state(c, i + 1, targets, cfg.lightcone_cap);
            if (targets.size() <= kMaxMarginalQubits) {
                std::vector<std::size_t> local(targets.size());
                for (std::size_t k = 0; k < local.size(); ++k) local[k] = k;
                st.table = marginal_distribution(state, local);
            } else {
                st.state = std::move(state);
            }
        }
    }

    const GbgCircuit &circuit() const { return c_; }

    /// q-tilde(1 | x_B) at single-qubit gate i. Throws if x_B has probability zero, which a
    /// trajectory of the sampler never produces.
    double prob_one(std::size_t i, const Bits &x) const {
        const Step &st = steps_[i];
        std::array<double, 2> j;
        if (!st.table.empty()) {
            std::size_t idx = 0;
            for (std::size_t k = 0; k < st.b.size(); ++k) idx |= std::size_t{x[st.b[k]]} << (k + 1);
            j = {st.table[idx], st.table[idx | 1]};
        } else {
            Bits xb(st.b.size());
            for (std::size_t k = 0; k < st.b.size(); ++k) xb[k] = x[st.b[k]];
            j = st.tab ? detail::joint_from_tableau(*st.tab, st.a, st.b, xb) : detail::joint_from_dense(*st.state, xb);
        }
        double pb = j[0] + j[1];
        if (pb <= 1e-14) throw std::logic_error("gate-by-gate conditioning on a zero-probability x_B");
        return j[1] / pb;
    }

    Bits sample(Rng &rng) const {
        Bits x(c_.num_qubits(), 0);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        for (std::size_t i = 0; i < c_.gates.size(); ++i) {
            const auto &g = c_.gates[i];
            if (g.kind == GbgGate::Kind::Cnot) {
                x[g.q1] ^= x[g.q0];
            } else {
                x[g.q0] = u01(rng) < prob_one(i, x) ? 1 : 0;
            }
        }
        return x;
    }

    /// Exact law of the sampler's output, propagated gate by gate over all 2^n strings.
    std::vector<double> output_distribution() const {
        std::size_t n = c_.num_qubits();
        if (n > kDenseCap) throw std::length_error("exact sampler law exceeds the qubit cap");
        std::vector<double> p(std::size_t{1} << n, 0.0), next(p.size());
        p[0] = 1;
        Bits x(n);
        for (std::size_t i = 0; i < c_.gates.size(); ++i) {
            const auto &g = c_.gates[i];
            std::fill(next.begin(), next.end(), 0.0);
            for (std::size_t v = 0; v < p.size(); ++v) {
                if (p[v] == 0) continue;
                if (g.kind == GbgGate::Kind::Cnot) {
                    std::size_t w = ((v >> g.q0) & 1) ? v ^ (std::size_t{1} << g.q1) : v;
                    next[w] += p[v];
                    continue;
                }
                for (std::size_t q = 0; q < n; ++q) x[q] = (v >> q) & 1;
                double p1 = prob_one(i, x);
                std::size_t v0 = v & ~(std::size_t{1} << g.q0), v1 = v0 | (std::size_t{1} << g.q0);
                next[v0] += p[v] * (1 - p1);
                next[v1] += p[v] * p1;
            }
            std::swap(p, next);
        }
        return p;
    }

   private:
    struct Step {
        std::size_t a = 0;
        std::vector<std::size_t> b;
        std::vector<double> table;  // bit 0: a, bit k+1: b[k]
        std::optional<DenseState> state;
        std::optional<StabilizerTableau> tab;
    };
    GbgCircuit c_;
    GbgConfig cfg_;
    std::vector<Step> steps_;
};

/// Per layer: single-qubit gates on about 2/3 of the qubits, then CNOTs on about 1/3 of the
/// horizontal and vertical neighbour pairs. Gates are Haar-random unless `clifford` is set.
inline GbgCircuit random_gbg_circuit(std::size_t rows, std::size_t cols, std::size_t depth, bool clifford, Rng &rng) {
    GbgCircuit c;
    c.grid = {rows, cols};
    std::size_t n = rows * cols;
    for (std::size_t d = 0; d < depth; ++d) {
        for (std::size_t q = 0; q < n; ++q) {
            if (uniform_below(rng, 3) == 0) continue;
            c.add_u1(q, clifford ? u1_from_clifford(sample_uniform_clifford(1, rng)) : haar_u1(rng));
        }
        for (std::size_t q = 0; q < n; ++q) {
            std::size_t r = c.grid.row(q), col = c.grid.col(q);
            if (col + 1 < cols && uniform_below(rng, 3) == 0) {
                if (uniform_below(rng, 2)) {
                    c.add_cnot(q, q + 1);
                } else {
                    c.add_cnot(q + 1, q);
                }
            }
            if (r + 1 < rows && uniform_below(rng, 3) == 0) c.add_cnot(q, q + cols);
        }
    }
    return c;
}

inline Bits run_gbg(const GbgCircuit &c, const GbgConfig &cfg, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    return GbgSampler(c, cfg).sample(rng);
}

/// `count` independent samples; sample i uses trial seed (seed, "gbg", i).
inline std::vector<Bits> sample_gbg(const GbgSampler &s, std::size_t count, std::uint64_t seed, std::size_t workers = 0) {
    return parallel_map<Bits>(
        count,
        [&](std::size_t i) {
            Rng rng = trial_rng(seed, "gbg", i);
            return s.sample(rng);
        },
        workers);
}

/// Full dense output state of a GbgCircuit after its first t gates.
inline DenseState run_gbg_dense(const GbgCircuit &c, std::size_t t) {
    DenseState s(c.num_qubits());
    for (std::size_t i = 0; i < t; ++i) {
        const auto &g = c.gates[i];
        if (g.kind == GbgGate::Kind::Cnot) {
            apply_unitary(s, cnot_matrix(), {g.q0, g.q1});
        } else {
            apply_unitary(s, g.u, {g.q0});
        }
    }
    return s;
}

namespace detail {

/// Amplitudes grouped as psi[z_B][z_C][a] for a state on qubits A, B, C (C = the rest).
struct Split {
    std::size_t da = 0, db = 0, dc = 0;
    std::vector<cplx> psi;
    cplx at(std::size_t zb, std::size_t zc, std::size_t a) const { return psi[(zb * dc + zc) * da + a]; }
};

inline Split split_state(const DenseState &s, const std::vector<std::size_t> &A, const std::vector<std::size_t> &B) {
    std::size_t n = s.num_qubits();
    std::vector<int> role(n, 2);
    for (auto q : A) role.at(q) = 0;
    for (auto q : B) {
        if (role.at(q) != 2) throw std::invalid_argument("A and B overlap");
        role[q] = 1;
    }
    std::vector<std::size_t> C;
    for (std::size_t q = 0; q < n; ++q) {
        if (role[q] == 2) C.push_back(q);
    }
    Split sp;
    sp.da = std::size_t{1} << A.size();
    sp.db = std::size_t{1} << B.size();
    sp.dc = std::size_t{1} << C.size();
    sp.psi.assign(s.amplitudes().size(), 0);
    for (std::size_t v = 0; v < s.amplitudes().size(); ++v) {
        std::size_t a = 0, b = 0, c = 0;
        for (std::size_t j = 0; j < A.size(); ++j) a |= ((v >> A[j]) & 1) << j;
        for (std::size_t j = 0; j < B.size(); ++j) b |= ((v >> B[j]) & 1) << j;
        for (std::size_t j = 0; j < C.size(); ++j) c |= ((v >> C[j]) & 1) << j;
        sp.psi[(b * sp.dc + c) * sp.da + a] = s.amplitudes()[v];
    }
    return sp;
}

/// Unnormalised sigma(z_B) = <z_B| Tr_C |psi><psi| |z_B>, row-major da x da.
inline std::vector<cplx> sigma_of(const Split &sp, std::size_t zb) {
    std::vector<cplx> m(sp.da * sp.da, 0);
    for (std::size_t zc = 0; zc < sp.dc; ++zc) {
        for (std::size_t i = 0; i < sp.da; ++i) {
            cplx vi = sp.at(zb, zc, i);
            if (vi == cplx(0)) continue;
            for (std::size_t j = 0; j < sp.da; ++j) m[i * sp.da + j] += vi * std::conj(sp.at(zb, zc, j));
        }
    }
    return m;
}

}  // namespace detail

/// E_{z_B ~ P_B} Tr(rho-tilde(z_B)^2) for a state on A, B and the rest.
inline double average_conditional_purity(const DenseState &s, const std::vector<std::size_t> &A,
                                         const std::vector<std::size_t> &B) {
    auto sp = detail::split_state(s, A, B);
    double total = 0;
    for (std::size_t zb = 0; zb < sp.db; ++zb) {
        auto m = detail::sigma_of(sp, zb);
        double pb = 0, tr2 = 0;
        for (std::size_t i = 0; i < sp.da; ++i) pb += m[i * sp.da + i].real();
        if (pb <= 1e-15) continue;
        for (auto v : m) tr2 += std::norm(v);
        total += tr2 / pb;
    }
    return total;
}

/// 2 sum_{t in Gamma} sqrt(1 - E Tr(rho-tilde_t^2)), with B(t) the side-L shield.
inline double tvd_bound_rhs(const GbgCircuit &c, std::size_t L) {
    c.validate();
    DenseState s(c.num_qubits());
    double rhs = 0;
    for (const auto &g : c.gates) {
        if (g.kind == GbgGate::Kind::Cnot) {
            apply_unitary(s, cnot_matrix(), {g.q0, g.q1});
            continue;
        }
        apply_unitary(s, g.u, {g.q0});
        double pur = average_conditional_purity(s, {g.q0}, shield_of(c.grid, g.q0, L));
        rhs += 2 * std::sqrt(std::max(0.0, 1 - pur));
    }
    return rhs;
}

struct TvdReport {
    std::size_t n = 0, L = 0, samples = 0;
    double lhs_exact = 0;      // ||P-tilde - P_m||_1 from the sampler's exact law
    double lhs_empirical = 0;  // ||P-hat - P_m||_1 from samples
    double rhs = 0;
    /// Tolerance for the empirical side: the bias bound sum_x sqrt(p(1-p)/N) plus 3 sigma, with
    /// sigma = 1/sqrt(N) from bounded differences (one sample moves the statistic by <= 2/N).
    double bias = 0, sigma = 0;
    std::uint64_t seed = 0;

    bool pass() const { return lhs_exact <= rhs + 1e-9 && lhs_empirical <= rhs + bias + 3 * sigma; }
};

inline TvdReport tvd_bound_check(const GbgCircuit &c, std::size_t L, std::size_t samples, std::uint64_t seed,
                                 std::size_t workers = 0) {
    GbgConfig cfg;
    cfg.L = L;
    GbgSampler sampler(c, cfg);
    auto pm = run_gbg_dense(c, c.gates.size()).probabilities();
    auto pt = sampler.output_distribution();
    TvdReport r;
    r.n = c.num_qubits();
    r.L = L;
    r.samples = samples;
    r.seed = seed;
    r.rhs = tvd_bound_rhs(c, L);
    r.lhs_exact = 2 * total_variation(pt, pm);
    if (samples > 0) {
        std::vector<double> hist(pm.size(), 0.0);
        for (const auto &x : sample_gbg(sampler, samples, seed, workers)) hist[pack_bits(x)] += 1;
        double N = static_cast<double>(samples);
        for (double &h : hist) h /= N;
        r.lhs_empirical = 2 * total_variation(hist, pm);
        for (double p : hist) r.bias += std::sqrt(std::max(0.0, p * (1 - p)) / N);
        r.sigma = 1 / std::sqrt(N);
    }
    return r;
}

struct PurityFidelityReport {
    double fidelity = 0;  // E_{z ~ P_BC} F(rho_t(z), rho-tilde_t(z_B))
    double purity = 0;    // E_{z_B ~ P_B} Tr(rho-tilde_t(z_B)^2)
    bool pass() const { return std::abs(fidelity - purity) <= 1e-8; }
};

/// Both sides of the purity/fidelity identity after the first t gates, by enumeration over z.
inline PurityFidelityReport purity_fidelity_identity_check(const GbgCircuit &c, std::size_t t, const Tripartition &part) {
    c.validate();
    part.validate(c.num_qubits());
    if (part.A.size() > 4) throw std::invalid_argument("identity check supports |A| <= 4");
    if (t > c.gates.size()) throw std::out_of_range("prefix longer than the circuit");
    auto s = run_gbg_dense(c, t);
    auto sp = detail::split_state(s, part.A, part.B);
    PurityFidelityReport r;
    for (std::size_t zb = 0; zb < sp.db; ++zb) {
        auto m = detail::sigma_of(sp, zb);
        double pb = 0, tr2 = 0;
        for (std::size_t i = 0; i < sp.da; ++i) pb += m[i * sp.da + i].real();
        if (pb <= 1e-15) continue;
        for (auto v : m) tr2 += std::norm(v);
        r.purity += tr2 / pb;
        // P(z) F(rho(z), rho-tilde) = <phi_z| sigma |phi_z> / P_B with phi_z unnormalised.
        for (std::size_t zc = 0; zc < sp.dc; ++zc) {
            cplx f = 0;
            for (std::size_t i = 0; i < sp.da; ++i) {
                for (std::size_t j = 0; j < sp.da; ++j) f += std::conj(sp.at(zb, zc, i)) * m[i * sp.da + j] * sp.at(zb, zc, j);
            }
            r.fidelity += f.real() / pb;
        }
    }
    return r;
}

// ---------------------------------------------------------------------------------------------
// Parallel schedule. The grid is tiled by L x L tiles. A single-qubit update at a qubit of tile
// (i, j) reads only bits within distance L/2, which lie in the 3L x 3L block of tiles
// (i-1..i+1, j-1..j+1). Tiles with equal (i mod 3, j mod 3) have disjoint blocks, giving at most
// 9 groups per layer.

struct ScheduleRegion {
    std::size_t tile_r = 0, tile_c = 0;
    std::size_t r0 = 0, c0 = 0, r1 = 0, c1 = 0;  // rows [r0, r1), columns [c0, c1)
    std::vector<std::size_t> gates;

    bool contains(const GridGeometry &g, std::size_t q) const {
        std::size_t r = g.row(q), c = g.col(q);
        return r >= r0 && r < r1 && c >= c0 && c < c1;
    }
    bool overlaps(const ScheduleRegion &o) const { return r0 < o.r1 && o.r0 < r1 && c0 < o.c1 && o.c0 < c1; }
};

struct ScheduleGroup {
    std::size_t residue_r = 0, residue_c = 0;
    std::vector<ScheduleRegion> regions;
};

struct LayerSchedule {
    std::size_t layer = 0;
    std::vector<ScheduleGroup> groups;
};

struct ParallelSchedule {
    std::size_t L = 1;
    std::vector<LayerSchedule> layers;

    std::size_t max_groups() const {
        std::size_t m = 0;
        for (const auto &l : layers) m = std::max(m, l.groups.size());
        return m;
    }
};

inline ParallelSchedule plan_parallel_schedule(const GbgCircuit &c, std::size_t L) {
    c.validate();
    if (L == 0) throw std::invalid_argument("L must be positive");
    auto layer_of = c.layers();
    std::size_t depth = 0;
    for (auto l : layer_of) depth = std::max(depth, l + 1);
    ParallelSchedule sched;
    sched.L = L;
    const auto &g = c.grid;
    std::size_t tr_count = (g.rows + L - 1) / L, tc_count = (g.cols + L - 1) / L;
    for (std::size_t layer = 0; layer < depth; ++layer) {
        LayerSchedule ls;
        ls.layer = layer;
        // tiles[tile index] -> gate indices
        std::vector<std::vector<std::size_t>> tiles(tr_count * tc_count);
        for (std::size_t i = 0; i < c.gates.size(); ++i) {
            if (layer_of[i] != layer || c.gates[i].kind != GbgGate::Kind::U1) continue;
            std::size_t q = c.gates[i].q0;
            tiles[(g.row(q) / L) * tc_count + g.col(q) / L].push_back(i);
        }
        for (std::size_t rr = 0; rr < 3; ++rr) {
            for (std::size_t rc = 0; rc < 3; ++rc) {
                ScheduleGroup grp;
                grp.residue_r = rr;
                grp.residue_c = rc;
                for (std::size_t ti = rr; ti < tr_count; ti += 3) {
                    for (std::size_t tj = rc; tj < tc_count; tj += 3) {
                        const auto &gs = tiles[ti * tc_count + tj];
                        if (gs.empty()) continue;
                        ScheduleRegion reg;
                        reg.tile_r = ti;
                        reg.tile_c = tj;
                        reg.r0 = ti == 0 ? 0 : (ti - 1) * L;
                        reg.c0 = tj == 0 ? 0 : (tj - 1) * L;
                        reg.r1 = std::min(g.rows, (ti + 2) * L);
                        reg.c1 = std::min(g.cols, (tj + 2) * L);
                        reg.gates = gs;
                        grp.regions.push_back(std::move(reg));
                    }
                }
                if (!grp.regions.empty()) ls.groups.push_back(std::move(grp));
            }
        }
        sched.layers.push_back(std::move(ls));
    }
    return sched;
}

/// Problems found in a schedule; empty when it is valid. Checks at most 9 groups per layer,
/// pairwise disjoint regions within a group, regions of side at most 3L containing the shield
/// of each of their gates, and that every single-qubit gate is scheduled exactly once in its layer.
inline std::vector<std::string> validate_schedule(const GbgCircuit &c, const ParallelSchedule &s) {
    std::vector<std::string> errs;
    auto layer_of = c.layers();
    std::vector<int> seen(c.gates.size(), 0);
    const auto &g = c.grid;
    for (const auto &ls : s.layers) {
        if (ls.groups.size() > 9) errs.push_back("layer " + std::to_string(ls.layer) + " has more than 9 groups");
        for (const auto &grp : ls.groups) {
            for (std::size_t i = 0; i < grp.regions.size(); ++i) {
                const auto &r = grp.regions[i];
                if (r.r1 - r.r0 > 3 * s.L || r.c1 - r.c0 > 3 * s.L) errs.push_back("region wider than 3L");
                for (std::size_t j = 0; j < i; ++j) {
                    if (r.overlaps(grp.regions[j])) errs.push_back("overlapping regions in layer " + std::to_string(ls.layer));
                }
                for (auto gi : r.gates) {
                    if (gi >= c.gates.size() || c.gates[gi].kind != GbgGate::Kind::U1) {
                        errs.push_back("scheduled gate " + std::to_string(gi) + " is not a single-qubit gate");
                        continue;
                    }
                    ++seen[gi];
                    if (layer_of[gi] != ls.layer) errs.push_back("gate " + std::to_string(gi) + " scheduled in the wrong layer");
                    std::size_t a = c.gates[gi].q0;
                    if (!r.contains(g, a)) errs.push_back("gate " + std::to_string(gi) + " outside its region");
                    for (auto b : shield_of(g, a, s.L)) {
                        if (!r.contains(g, b)) {
                            errs.push_back("shield of gate " + std::to_string(gi) + " leaves its region");
                            break;
                        }
                    }
                }
            }
        }
    }
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        if (c.gates[i].kind == GbgGate::Kind::U1 && seen[i] != 1) {
            errs.push_back("gate " + std::to_string(i) + " scheduled " + std::to_string(seen[i]) + " times");
        }
    }
    return errs;
}

// ---------------------------------------------------------------------------------------------
// Text format: the circuit format with `U1 <q> | <8 hex doubles>` rows. The doubles are the real
// and imaginary parts of u00, u01, u10, u11, each as 16 hex digits of its IEEE-754 bits. CNOTs
// are written as GATE rows; one-qubit Clifford GATE rows are read as U1 gates.

namespace detail {

inline std::string double_hex(double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    std::string s(16, '0');
    for (std::size_t i = 0; i < 16; ++i) s[15 - i] = hex_digit(static_cast<unsigned>((bits >> (4 * i)) & 15));
    return s;
}

inline double hex_double(const std::string &s) {
    if (s.size() != 16) throw std::invalid_argument("U1 entries need 16 hex digits");
    std::uint64_t bits = 0;
    for (char ch : s) {
        int v = hex_value(ch);
        if (v < 0) throw std::invalid_argument(std::string("bad hex digit '") + ch + "'");
        bits = (bits << 4) | static_cast<std::uint64_t>(v);
    }
    double d = std::bit_cast<double>(bits);
    if (!std::isfinite(d)) throw std::invalid_argument("non-finite U1 entry");
    return d;
}

}  // namespace detail

inline void write_gbg_circuit(std::ostream &os, const GbgCircuit &c) {
    os << "QUBITS " << c.num_qubits() << " GRID " << c.grid.rows << ' ' << c.grid.cols << '\n';
    auto layers = c.layers();
    static const std::string cnot_hex = encode_gate_hex(CliffordGate::named("CNOT"));
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        const auto &g = c.gates[i];
        if (g.kind == GbgGate::Kind::Cnot) {
            os << "GATE " << layers[i] << ' ' << g.q0 << ' ' << g.q1 << " | " << cnot_hex << '\n';
        } else {
            os << "U1 " << g.q0 << " |";
            for (auto v : g.u.a) os << ' ' << detail::double_hex(v.real()) << ' ' << detail::double_hex(v.imag());
            os << '\n';
        }
    }
}

inline std::string serialize_gbg_circuit(const GbgCircuit &c) {
    std::ostringstream os;
    write_gbg_circuit(os, c);
    return os.str();
}

inline GbgCircuit parse_gbg_circuit(std::istream &is) {
    GbgCircuit c;
    bool have_header = false;
    std::size_t lineno = 0;
    static const CliffordGate cnot = CliffordGate::named("CNOT");
    for (std::string raw; std::getline(is, raw);) {
        ++lineno;
        auto hash = raw.find('#');
        std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
        auto bar = line.find('|');
        std::istringstream hs(bar == std::string::npos ? line : line.substr(0, bar));
        std::vector<std::string> toks, payload;
        for (std::string t; hs >> t;) toks.push_back(t);
        if (bar != std::string::npos) {
            std::istringstream ps(line.substr(bar + 1));
            for (std::string t; ps >> t;) payload.push_back(t);
        }
        if (toks.empty()) {
            if (!payload.empty()) throw ParseError(lineno, "payload without a record");
            continue;
        }
        const auto &kw = toks[0];
        if (kw == "QUBITS") {
            if (have_header) throw ParseError(lineno, "duplicate QUBITS header");
            if (toks.size() != 5 || toks[2] != "GRID") throw ParseError(lineno, "expected 'QUBITS n GRID rows cols'");
            std::size_t n = detail::parse_index(toks[1], lineno);
            c.grid = {detail::parse_index(toks[3], lineno), detail::parse_index(toks[4], lineno)};
            if (c.grid.num_qubits() != n || n == 0) throw ParseError(lineno, "qubit count does not match grid");
            have_header = true;
        } else if (kw == "DEPTH") {
            if (toks.size() != 2) throw ParseError(lineno, "expected 'DEPTH d'");
            detail::parse_index(toks[1], lineno);
        } else if (kw == "GATE" || kw == "U1") {
            if (!have_header) throw ParseError(lineno, kw + " before QUBITS header");
            std::vector<std::size_t> qs;
            for (std::size_t i = kw == "GATE" ? 2 : 1; i < toks.size(); ++i) {
                std::size_t q = detail::parse_index(toks[i], lineno);
                if (q >= c.num_qubits()) throw ParseError(lineno, "qubit " + toks[i] + " out of range");
                qs.push_back(q);
            }
            if (kw == "GATE") {
                if (toks.size() < 3) throw ParseError(lineno, "GATE needs a layer and at least one qubit");
                detail::parse_index(toks[1], lineno);
                if (payload.size() != 1) throw ParseError(lineno, "GATE needs one hex payload");
                CliffordGate g;
                try {
                    g = decode_gate_hex(qs.size(), payload[0]);
                } catch (const std::invalid_argument &e) {
                    throw ParseError(lineno, e.what());
                }
                if (qs.size() == 2 && g == cnot) {
                    c.add_cnot(qs[0], qs[1]);
                } else if (qs.size() == 1) {
                    c.add_u1(qs[0], clifford_matrix(g));
                } else {
                    throw ParseError(lineno, "only CNOT and single-qubit gates are allowed");
                }
            } else {
                if (qs.size() != 1) throw ParseError(lineno, "U1 acts on exactly one qubit");
                if (payload.size() != 8) throw ParseError(lineno, "U1 needs 8 hex doubles");
                DenseMatrix u(2);
                try {
                    for (std::size_t k = 0; k < 4; ++k) u.a[k] = cplx(detail::hex_double(payload[2 * k]), detail::hex_double(payload[2 * k + 1]));
                } catch (const std::invalid_argument &e) {
                    throw ParseError(lineno, e.what());
                }
                c.add_u1(qs[0], u);
            }
        } else {
            throw ParseError(lineno, "unknown record '" + kw + "'");
        }
    }
    if (!have_header) throw ParseError(lineno, "missing QUBITS header");
    try {
        c.validate();
    } catch (const std::invalid_argument &e) {
        throw ParseError(lineno, e.what());
    }
    return c;
}

inline GbgCircuit parse_gbg_circuit(const std::string &text) {
    std::istringstream is(text);
    return parse_gbg_circuit(is);
}

inline void write_samples(std::ostream &os, const std::vector<Bits> &samples) {
    for (const auto &x : samples) os << bits_string(x) << '\n';
}

}  // namespace miesim

#endif
