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

#ifndef MIESIM_TABLEAU_HPP
#define MIESIM_TABLEAU_HPP

#include <array>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "miesim/clifford_gate.hpp"
#include "miesim/dyadic.hpp"
#include "miesim/gf2.hpp"
#include "miesim/pauli.hpp"

namespace miesim {

struct MeasurementResult {
    bool outcome = false;
    bool deterministic = false;
};

/// Gate prepared for repeated application to tableau rows.
class CompiledGate {
   public:
    explicit CompiledGate(const CliffordGate &g) : k_(g.num_qubits()), kw_(words_for(g.num_qubits())) {
        if (k_ <= 2) {
            std::size_t patterns = std::size_t{1} << (2 * k_);
            table_.resize(patterns);
            for (std::size_t b = 0; b < patterns; ++b) {
                PauliString p(k_);
                for (std::size_t j = 0; j < k_; ++j) {
                    p.xs.set(j, (b >> (2 * j)) & 1);
                    p.zs.set(j, (b >> (2 * j + 1)) & 1);
                }
                PauliString out = g.conjugate(p);
                std::uint8_t o = 0;
                for (std::size_t j = 0; j < k_; ++j) {
                    o |= static_cast<std::uint8_t>(out.xs[j] << (2 * j));
                    o |= static_cast<std::uint8_t>(out.zs[j] << (2 * j + 1));
                }
                table_[b] = {o, out.sign};
            }
        }
        img_.assign(2 * k_ * 2 * kw_, 0);
        img_sign_.resize(2 * k_);
        for (std::size_t i = 0; i < 2 * k_; ++i) {
            const auto &p = g.image(i);
            std::copy(p.xs.data(), p.xs.data() + kw_, img_.data() + i * 2 * kw_);
            std::copy(p.zs.data(), p.zs.data() + kw_, img_.data() + i * 2 * kw_ + kw_);
            img_sign_[i] = p.sign;
        }
    }

    std::size_t num_qubits() const { return k_; }
    bool has_table() const { return !table_.empty(); }

    struct Entry {
        std::uint8_t out;
        bool flip;
    };
    const Entry &entry(std::size_t pattern) const { return table_[pattern]; }

    /// Conjugates a compact local Pauli (kw words of x then kw words of z). Returns the sign flip.
    bool conjugate_compact(const word_t *lx, const word_t *lz, word_t *ox, word_t *oz) const {
        std::fill(ox, ox + kw_, 0);
        std::fill(oz, oz + kw_, 0);
        unsigned e = 0;
        bool s = false;
        auto absorb = [&](std::size_t i) {
            const word_t *ix = img_.data() + i * 2 * kw_;
            const word_t *iz = ix + kw_;
            e += product_phase(ox, oz, ix, iz, kw_);
            xor_words(ox, ix, kw_);
            xor_words(oz, iz, kw_);
            s ^= img_sign_[i];
        };
        for (std::size_t w = 0; w < kw_; ++w) {
            for (word_t m = lx[w]; m; m &= m - 1) absorb(w * 64 + static_cast<std::size_t>(std::countr_zero(m)));
        }
        for (std::size_t w = 0; w < kw_; ++w) {
            for (word_t m = lz[w]; m; m &= m - 1) absorb(k_ + w * 64 + static_cast<std::size_t>(std::countr_zero(m)));
            e += static_cast<unsigned>(std::popcount(lx[w] & lz[w]));
        }
        return s ^ ((e & 2) != 0);
    }

    std::size_t local_words() const { return kw_; }

   private:
    std::size_t k_, kw_;
    std::vector<Entry> table_;
    std::vector<word_t> img_;
    std::vector<bool> img_sign_;
};

/// Stabilizer state on n qubits in Aaronson-Gottesman form. Rows 0..n-1 are destabilizers and
/// rows n..2n-1 are stabilizers; each row stores its x words then its z words.
class StabilizerTableau {
   public:
    StabilizerTableau() = default;

    static StabilizerTableau new_zero_state(std::size_t n) {
        StabilizerTableau t(n);
        for (std::size_t q = 0; q < n; ++q) {
            set_bit(t.xrow(q), q, true);
            set_bit(t.zrow(n + q), q, true);
        }
        return t;
    }

    /// Tableau of U|0^k> where U is the gate; destabilizers are U X U^dag.
    static StabilizerTableau from_gate(const CliffordGate &g) {
        std::size_t n = g.num_qubits();
        StabilizerTableau t(n);
        for (std::size_t i = 0; i < 2 * n; ++i) t.set_row(i, g.image(i));
        return t;
    }

    /// State stabilized by n independent commuting Hermitian Paulis. Destabilizers are derived.
    static StabilizerTableau from_stabilizers(const std::vector<PauliString> &stabs) {
        std::size_t n = stabs.size();
        for (const auto &s : stabs) {
            if (s.num_qubits() != n) throw std::invalid_argument("need n stabilizers on n qubits");
        }
        // Row j of [M | I] has M_j = (z_j | x_j), so M_j . d is the symplectic form <d, s_j>.
        GF2Matrix aug(n, 3 * n);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t q = 0; q < n; ++q) {
                aug.set(j, q, stabs[j].zs[q]);
                aug.set(j, n + q, stabs[j].xs[q]);
            }
            aug.set(j, 2 * n + j, true);
        }
        auto piv = aug.rref();
        if (piv.size() < n || piv[n - 1] >= 2 * n) throw std::invalid_argument("stabilizers are dependent");
        std::vector<PauliString> destabs(n, PauliString(n));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                if (aug.get(k, 2 * n + i)) {
                    std::size_t c = piv[k];
                    if (c < n) {
                        destabs[i].xs.set(c);
                    } else {
                        destabs[i].zs.set(c - n);
                    }
                }
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < i; ++j) {
                if (!destabs[i].commutes(destabs[j])) {
                    destabs[i].xs ^= stabs[j].xs;
                    destabs[i].zs ^= stabs[j].zs;
                }
            }
            destabs[i].sign = false;
        }
        StabilizerTableau t(n);
        for (std::size_t i = 0; i < n; ++i) {
            t.set_row(i, destabs[i]);
            t.set_row(n + i, stabs[i]);
        }
        if (!t.validate()) throw std::invalid_argument("stabilizers do not commute");
        return t;
    }

    std::size_t num_qubits() const { return n_; }

    PauliString destabilizer(std::size_t i) const { return row_pauli(i); }
    PauliString stabilizer(std::size_t i) const { return row_pauli(n_ + i); }
    std::vector<PauliString> stabilizers() const {
        std::vector<PauliString> out;
        for (std::size_t i = 0; i < n_; ++i) out.push_back(stabilizer(i));
        return out;
    }

    word_t *xrow(std::size_t r) { return data_.data() + r * 2 * w_; }
    word_t *zrow(std::size_t r) { return data_.data() + r * 2 * w_ + w_; }
    const word_t *xrow(std::size_t r) const { return data_.data() + r * 2 * w_; }
    const word_t *zrow(std::size_t r) const { return data_.data() + r * 2 * w_ + w_; }
    bool sign(std::size_t r) const { return signs_[r]; }
    std::size_t words_per_half() const { return w_; }

    /// Commutation pattern check: stabilizers commute pairwise, destabilizers commute pairwise,
    /// and destabilizer i anticommutes with stabilizer j exactly when i == j.
    bool validate() const {
        for (std::size_t a = 0; a < 2 * n_; ++a) {
            for (std::size_t b = a + 1; b < 2 * n_; ++b) {
                bool anti = anticommutes_words(xrow(a), zrow(a), xrow(b), zrow(b), w_);
                bool expect = a < n_ && b == a + n_;
                if (anti != expect) return false;
            }
        }
        return true;
    }

    void apply_gate(const CliffordGate &g, std::span<const std::size_t> support) {
        apply_compiled(CompiledGate(g), support);
    }

    void apply_compiled(const CompiledGate &cg, std::span<const std::size_t> support) {
        std::size_t k = cg.num_qubits();
        if (support.size() != k) throw std::invalid_argument("support size does not match gate");
        for (auto q : support) {
            if (q >= n_) throw std::out_of_range("gate support out of range");
        }
        if (cg.has_table()) {
            for (std::size_t r = 0; r < 2 * n_; ++r) {
                word_t *x = xrow(r), *z = zrow(r);
                std::size_t b = 0;
                for (std::size_t j = 0; j < k; ++j) {
                    b |= static_cast<std::size_t>(get_bit(x, support[j])) << (2 * j);
                    b |= static_cast<std::size_t>(get_bit(z, support[j])) << (2 * j + 1);
                }
                if (b == 0) continue;
                const auto &e = cg.entry(b);
                for (std::size_t j = 0; j < k; ++j) {
                    set_bit(x, support[j], (e.out >> (2 * j)) & 1);
                    set_bit(z, support[j], (e.out >> (2 * j + 1)) & 1);
                }
                if (e.flip) signs_[r] ^= 1;
            }
            return;
        }
        std::size_t kw = cg.local_words();
        std::vector<word_t> buf(4 * kw);
        word_t *lx = buf.data(), *lz = lx + kw, *ox = lz + kw, *oz = ox + kw;
        for (std::size_t r = 0; r < 2 * n_; ++r) {
            word_t *x = xrow(r), *z = zrow(r);
            std::fill(lx, lx + 2 * kw, 0);
            bool any = false;
            for (std::size_t j = 0; j < k; ++j) {
                bool bx = get_bit(x, support[j]), bz = get_bit(z, support[j]);
                if (bx) set_bit(lx, j, true);
                if (bz) set_bit(lz, j, true);
                any |= bx | bz;
            }
            if (!any) continue;
            if (cg.conjugate_compact(lx, lz, ox, oz)) signs_[r] ^= 1;
            for (std::size_t j = 0; j < k; ++j) {
                set_bit(x, support[j], get_bit(ox, j));
                set_bit(z, support[j], get_bit(oz, j));
            }
        }
    }

    /// Applies a sequence of gates of arity at most two using a qubit-major layout.
    void apply_small_gates(const std::vector<std::pair<const CliffordGate *, std::vector<std::size_t>>> &ops) {
        std::size_t rows = 2 * n_, rw = words_for(rows);
        std::vector<word_t> xc(n_ * rw, 0), zc(n_ * rw, 0), sg(rw, 0);
        to_columns(xc, zc, sg, rw);
        std::vector<word_t> tmp(4 * rw);
        for (const auto &[g, support] : ops) {
            std::size_t k = g->num_qubits();
            if (k > 2 || support.size() != k) throw std::invalid_argument("apply_small_gates needs arity <= 2");
            for (auto q : support) {
                if (q >= n_) throw std::out_of_range("gate support out of range");
            }
            // in[2j] = x column of support[j], in[2j+1] = z column.
            std::array<word_t *, 4> in{};
            for (std::size_t j = 0; j < k; ++j) {
                in[2 * j] = xc.data() + support[j] * rw;
                in[2 * j + 1] = zc.data() + support[j] * rw;
            }
            std::size_t nin = 2 * k;
            // Sign flip as a boolean function of the input pattern, in algebraic normal form.
            std::array<bool, 16> anf{};
            std::array<std::size_t, 4> outmask{};
            for (std::size_t b = 0; b < (std::size_t{1} << nin); ++b) {
                PauliString p(k);
                for (std::size_t j = 0; j < k; ++j) {
                    p.xs.set(j, (b >> (2 * j)) & 1);
                    p.zs.set(j, (b >> (2 * j + 1)) & 1);
                }
                anf[b] = g->conjugate(p).sign;
            }
            for (std::size_t i = 0; i < nin; ++i) {
                for (std::size_t b = 0; b < (std::size_t{1} << nin); ++b) {
                    if (b >> i & 1) anf[b] = anf[b] ^ anf[b ^ (std::size_t{1} << i)];
                }
            }
            for (std::size_t i = 0; i < nin; ++i) {
                const PauliString &img = g->image(i % 2 == 0 ? i / 2 : k + i / 2);
                for (std::size_t j = 0; j < k; ++j) {
                    if (img.xs[j]) outmask[2 * j] |= std::size_t{1} << i;
                    if (img.zs[j]) outmask[2 * j + 1] |= std::size_t{1} << i;
                }
            }
            for (std::size_t w = 0; w < rw; ++w) {
                word_t v[4] = {0, 0, 0, 0};
                for (std::size_t i = 0; i < nin; ++i) v[i] = in[i][w];
                word_t flip = 0;
                for (std::size_t b = 1; b < (std::size_t{1} << nin); ++b) {
                    if (!anf[b]) continue;
                    word_t m = ~word_t{0};
                    for (std::size_t i = 0; i < nin; ++i) {
                        if (b >> i & 1) m &= v[i];
                    }
                    flip ^= m;
                }
                sg[w] ^= flip;
                for (std::size_t o = 0; o < nin; ++o) {
                    word_t acc = 0;
                    for (std::size_t i = 0; i < nin; ++i) {
                        if (outmask[o] >> i & 1) acc ^= v[i];
                    }
                    in[o][w] = acc;
                }
            }
        }
        from_columns(xc, zc, sg, rw);
    }

    MeasurementResult measure_z(std::size_t q, std::mt19937_64 &rng) {
        auto r = measure_impl(q, std::nullopt, &rng);
        return {r.first, r.second};
    }

    /// Projects onto the given Z outcome. Returns the outcome probability (0, 1/2 or 1);
    /// on probability 0 the state is unchanged.
    double force_measure_z(std::size_t q, bool outcome) {
        if (q >= n_) throw std::out_of_range("measured qubit out of range");
        auto p = find_x_stabilizer(q);
        if (p < 2 * n_) {
            measure_impl(q, outcome, nullptr);
            return 0.5;
        }
        return deterministic_outcome(q) == outcome ? 1.0 : 0.0;
    }

    /// Outcome that a Z measurement on q would give with certainty, if it is deterministic.
    std::optional<bool> peek_z(std::size_t q) const {
        if (find_x_stabilizer(q) < 2 * n_) return std::nullopt;
        return deterministic_outcome(q);
    }

    /// Sign s with (-1)^s p in the stabilizer group, or nullopt when neither +p nor -p is.
    std::optional<bool> stabilizer_sign_of(const PauliString &p) const {
        if (p.num_qubits() != n_) throw std::invalid_argument("Pauli width mismatch");
        for (std::size_t i = 0; i < n_; ++i) {
            if (anticommutes_words(p.xs.data(), p.zs.data(), xrow(n_ + i), zrow(n_ + i), w_)) return std::nullopt;
        }
        std::vector<word_t> acc(2 * w_, 0);
        bool s = false;
        unsigned e = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (anticommutes_words(p.xs.data(), p.zs.data(), xrow(i), zrow(i), w_)) {
                e += product_phase(acc.data(), acc.data() + w_, xrow(n_ + i), zrow(n_ + i), w_);
                xor_words(acc.data(), xrow(n_ + i), 2 * w_);
                s ^= signs_[n_ + i];
            }
        }
        if (e & 2) s = !s;
        return s != p.sign;
    }

    /// True when both tableaux describe the same state, signs included.
    bool same_state(const StabilizerTableau &o) const {
        if (o.n_ != n_) return false;
        for (std::size_t i = 0; i < n_; ++i) {
            auto s = stabilizer_sign_of(o.stabilizer(i));
            if (!s || *s) return false;
        }
        return true;
    }

    /// Number of independent stabilizers supported inside the region.
    std::size_t region_stabilizer_dim(const std::vector<std::size_t> &region) const {
        std::vector<word_t> mask(w_, ~word_t{0});
        for (auto q : region) {
            if (q >= n_) throw std::out_of_range("region qubit out of range");
            set_bit(mask.data(), q, false);
        }
        if (n_ % 64) mask[w_ - 1] &= (word_t{1} << (n_ % 64)) - 1;
        EchelonBasis basis(2 * w_ * 64, 0);
        std::vector<word_t> row(2 * w_);
        std::size_t zero = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t w = 0; w < w_; ++w) {
                row[w] = xrow(n_ + i)[w] & mask[w];
                row[w_ + w] = zrow(n_ + i)[w] & mask[w];
            }
            if (!basis.insert(row.data(), nullptr)) ++zero;
        }
        return zero;
    }

    /// Tr(rho_R^2), an exact power of two.
    Dyadic region_purity(const std::vector<std::size_t> &region) const {
        std::vector<std::size_t> r = region;
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
        std::size_t dim = region_stabilizer_dim(r);
        return Dyadic::pow2_neg(static_cast<unsigned>(r.size() - dim));
    }

    /// State of a region that is pure (for example after measuring everything else).
    /// Qubits of the result follow the order of `region`.
    StabilizerTableau reduced_pure_state(const std::vector<std::size_t> &region) const {
        std::size_t m = region.size();
        std::vector<bool> in_region(n_, false);
        for (auto q : region) in_region.at(q) = true;
        std::vector<std::size_t> outside;
        for (std::size_t q = 0; q < n_; ++q) {
            if (!in_region[q]) outside.push_back(q);
        }
        std::size_t oc = 2 * outside.size();
        EchelonBasis basis(oc, n_);
        std::vector<word_t> row(words_for(oc)), payload(words_for(n_));
        std::vector<PauliString> gens;
        for (std::size_t i = 0; i < n_; ++i) {
            std::fill(row.begin(), row.end(), 0);
            std::fill(payload.begin(), payload.end(), 0);
            for (std::size_t j = 0; j < outside.size(); ++j) {
                if (get_bit(xrow(n_ + i), outside[j])) set_bit(row.data(), 2 * j, true);
                if (get_bit(zrow(n_ + i), outside[j])) set_bit(row.data(), 2 * j + 1, true);
            }
            set_bit(payload.data(), i, true);
            if (basis.insert(row.data(), payload.data())) continue;
            PauliString prod(n_);
            for (std::size_t j = 0; j < n_; ++j) {
                if (get_bit(payload.data(), j)) {
                    if (prod.multiply_right(stabilizer(j))) throw std::logic_error("stabilizers anticommute");
                }
            }
            PauliString local(m);
            local.sign = prod.sign;
            for (std::size_t j = 0; j < m; ++j) {
                local.xs.set(j, prod.xs[region[j]]);
                local.zs.set(j, prod.zs[region[j]]);
            }
            gens.push_back(std::move(local));
        }
        if (gens.size() != m) throw std::invalid_argument("region is not in a pure state");
        return from_stabilizers(gens);
    }

   private:
    explicit StabilizerTableau(std::size_t n)
        : n_(n), w_(words_for(n)), data_(2 * n * 2 * words_for(n), 0), signs_(2 * n, 0) {}

    void set_row(std::size_t r, const PauliString &p) {
        std::copy(p.xs.data(), p.xs.data() + w_, xrow(r));
        std::copy(p.zs.data(), p.zs.data() + w_, zrow(r));
        signs_[r] = p.sign;
    }

    PauliString row_pauli(std::size_t r) const {
        PauliString p(n_);
        std::copy(xrow(r), xrow(r) + w_, p.xs.data());
        std::copy(zrow(r), zrow(r) + w_, p.zs.data());
        p.sign = signs_[r];
        return p;
    }

    /// row[dst] <- row[dst] * row[src]; sign tracked only when `signed_row`.
    void rowmul(std::size_t dst, std::size_t src, bool signed_row) {
        if (signed_row) {
            unsigned e = product_phase(xrow(dst), zrow(dst), xrow(src), zrow(src), w_);
            signs_[dst] ^= signs_[src] ^ ((e >> 1) & 1);
        }
        xor_words(xrow(dst), xrow(src), 2 * w_);
    }

    std::size_t find_x_stabilizer(std::size_t q) const {
        for (std::size_t p = n_; p < 2 * n_; ++p) {
            if (get_bit(xrow(p), q)) return p;
        }
        return 2 * n_;
    }

    bool deterministic_outcome(std::size_t q) const {
        std::vector<word_t> acc(2 * w_, 0);
        bool s = false;
        unsigned e = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (get_bit(xrow(i), q)) {
                e += product_phase(acc.data(), acc.data() + w_, xrow(n_ + i), zrow(n_ + i), w_);
                xor_words(acc.data(), xrow(n_ + i), 2 * w_);
                s ^= signs_[n_ + i];
            }
        }
        return s ^ ((e & 2) != 0);
    }

    std::pair<bool, bool> measure_impl(std::size_t q, std::optional<bool> forced, std::mt19937_64 *rng) {
        if (q >= n_) throw std::out_of_range("measured qubit out of range");
        std::size_t p = find_x_stabilizer(q);
        if (p == 2 * n_) return {deterministic_outcome(q), true};
        for (std::size_t i = 0; i < 2 * n_; ++i) {
            if (i != p && i != p - n_ && get_bit(xrow(i), q)) rowmul(i, p, i >= n_);
        }
        std::copy(xrow(p), xrow(p) + 2 * w_, xrow(p - n_));
        signs_[p - n_] = signs_[p];
        std::fill(xrow(p), xrow(p) + 2 * w_, 0);
        set_bit(zrow(p), q, true);
        bool outcome = forced ? *forced : static_cast<bool>((*rng)() & 1);
        signs_[p] = outcome;
        return {outcome, false};
    }

    void to_columns(std::vector<word_t> &xc, std::vector<word_t> &zc, std::vector<word_t> &sg, std::size_t rw) const {
        std::size_t rows = 2 * n_;
        transpose_bits(data_.data(), rows, 2 * w_, xc.data(), n_, rw);
        transpose_bits(data_.data() + w_, rows, 2 * w_, zc.data(), n_, rw);
        for (std::size_t r = 0; r < rows; ++r) {
            if (signs_[r]) set_bit(sg.data(), r, true);
        }
    }

    void from_columns(const std::vector<word_t> &xc, const std::vector<word_t> &zc, const std::vector<word_t> &sg,
                      std::size_t rw) {
        std::size_t rows = 2 * n_;
        std::vector<word_t> xt(rows * w_), zt(rows * w_);
        transpose_bits(xc.data(), n_, rw, xt.data(), rows, w_);
        transpose_bits(zc.data(), n_, rw, zt.data(), rows, w_);
        for (std::size_t r = 0; r < rows; ++r) {
            std::copy(xt.data() + r * w_, xt.data() + (r + 1) * w_, xrow(r));
            std::copy(zt.data() + r * w_, zt.data() + (r + 1) * w_, zrow(r));
            signs_[r] = get_bit(sg.data(), r);
        }
    }

    std::size_t n_ = 0, w_ = 0;
    std::vector<word_t> data_;
    std::vector<std::uint8_t> signs_;
};

}  // namespace miesim

#endif
