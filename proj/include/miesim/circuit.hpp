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

#ifndef MIESIM_CIRCUIT_HPP
#define MIESIM_CIRCUIT_HPP

#include <algorithm>
#include <cstdlib>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "miesim/clifford_gate.hpp"
#include "miesim/tableau.hpp"

namespace miesim {

/// Row-major 2D grid: qubit r * cols + c sits at (r, c).
struct GridGeometry {
    std::size_t rows = 0;
    std::size_t cols = 0;

    std::size_t num_qubits() const { return rows * cols; }
    std::size_t index(std::size_t r, std::size_t c) const { return r * cols + c; }
    std::size_t row(std::size_t q) const { return q / cols; }
    std::size_t col(std::size_t q) const { return q % cols; }

    /// Chebyshev distance between two qubits.
    std::size_t distance(std::size_t a, std::size_t b) const {
        auto d = [](std::size_t x, std::size_t y) { return x > y ? x - y : y - x; };
        return std::max(d(row(a), row(b)), d(col(a), col(b)));
    }

    bool operator==(const GridGeometry &) const = default;
};

struct GateSlot {
    std::size_t layer = 0;
    std::vector<std::size_t> support;

    bool operator==(const GateSlot &) const = default;
};

/// Gate positions of an architecture, without the gates themselves.
struct CircuitTemplate {
    GridGeometry grid;
    std::size_t depth = 0;
    std::vector<GateSlot> slots;

    std::size_t num_qubits() const { return grid.num_qubits(); }

    std::size_t max_arity() const {
        std::size_t a = 0;
        for (const auto &s : slots) a = std::max(a, s.support.size());
        return a;
    }

    std::vector<std::size_t> layer_sizes() const {
        std::vector<std::size_t> sizes(depth, 0);
        for (const auto &s : slots) ++sizes.at(s.layer);
        return sizes;
    }

    /// Layers are non-decreasing and gates within a layer act on disjoint qubits.
    void validate() const {
        std::size_t n = num_qubits();
        std::vector<std::size_t> last_layer(n, static_cast<std::size_t>(-1));
        std::size_t prev = 0;
        for (std::size_t i = 0; i < slots.size(); ++i) {
            const auto &s = slots[i];
            if (s.layer >= depth) throw std::invalid_argument("slot " + std::to_string(i) + " layer out of range");
            if (s.layer < prev) throw std::invalid_argument("slot " + std::to_string(i) + " breaks layer order");
            prev = s.layer;
            if (s.support.empty()) throw std::invalid_argument("slot " + std::to_string(i) + " has empty support");
            for (auto q : s.support) {
                if (q >= n) throw std::invalid_argument("slot " + std::to_string(i) + " qubit out of range");
                if (last_layer[q] == s.layer) {
                    throw std::invalid_argument("slot " + std::to_string(i) + " overlaps another gate in layer " +
                                                std::to_string(s.layer));
                }
                last_layer[q] = s.layer;
            }
        }
    }
};

/// A template together with one Clifford gate per slot.
struct CliffordCircuit {
    CircuitTemplate tmpl;
    std::vector<CliffordGate> gates;

    std::size_t num_qubits() const { return tmpl.num_qubits(); }

    void validate() const {
        tmpl.validate();
        if (gates.size() != tmpl.slots.size()) throw std::invalid_argument("gate count does not match template");
        for (std::size_t i = 0; i < gates.size(); ++i) {
            if (gates[i].num_qubits() != tmpl.slots[i].support.size()) {
                throw std::invalid_argument("gate " + std::to_string(i) + " arity does not match its slot");
            }
            if (!gates[i].is_valid()) throw std::invalid_argument("gate " + std::to_string(i) + " is not Clifford");
        }
    }
};

/// Appends a gate in the earliest layer that follows every earlier gate on its support and keeps
/// layers non-decreasing.
inline void append_gate(CliffordCircuit &c, CliffordGate g, std::vector<std::size_t> support) {
    if (g.num_qubits() != support.size()) throw std::invalid_argument("gate arity does not match support");
    std::size_t layer = c.tmpl.slots.empty() ? 0 : c.tmpl.slots.back().layer;
    for (const auto &s : c.tmpl.slots) {
        for (auto q : support) {
            if (std::find(s.support.begin(), s.support.end(), q) != s.support.end()) layer = std::max(layer, s.layer + 1);
        }
    }
    c.tmpl.slots.push_back({layer, std::move(support)});
    c.tmpl.depth = std::max(c.tmpl.depth, layer + 1);
    c.gates.push_back(std::move(g));
}

/// Empty circuit on a grid.
inline CliffordCircuit empty_circuit(std::size_t rows, std::size_t cols) {
    CliffordCircuit c;
    c.tmpl.grid = {rows, cols};
    return c;
}

/// Applies every gate of the circuit, in order, to the tableau.
inline void apply_circuit(StabilizerTableau &t, const CliffordCircuit &c) {
    if (t.num_qubits() != c.num_qubits()) throw std::invalid_argument("circuit width mismatch");
    std::vector<std::pair<const CliffordGate *, std::vector<std::size_t>>> batch;
    auto flush = [&] {
        if (!batch.empty()) t.apply_small_gates(batch);
        batch.clear();
    };
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        if (c.gates[i].num_qubits() <= 2) {
            batch.emplace_back(&c.gates[i], c.tmpl.slots[i].support);
        } else {
            flush();
            t.apply_gate(c.gates[i], c.tmpl.slots[i].support);
        }
    }
    flush();
}

/// D|0^n>.
inline StabilizerTableau run_circuit(const CliffordCircuit &c) {
    auto t = StabilizerTableau::new_zero_state(c.num_qubits());
    apply_circuit(t, c);
    return t;
}

enum class Direction { Forward, Backward };

/// Forward: D p D^dag. Backward: D^dag p D.
inline PauliString conjugate_pauli(const CliffordCircuit &c, PauliString p, Direction dir) {
    if (p.num_qubits() != c.num_qubits()) throw std::invalid_argument("Pauli width mismatch");
    auto touches = [&p](const std::vector<std::size_t> &support) {
        for (auto q : support) {
            if (p.xs[q] || p.zs[q]) return true;
        }
        return false;
    };
    auto apply = [&](std::size_t i) {
        const auto &support = c.tmpl.slots[i].support;
        if (!touches(support)) return;
        const auto &g = c.gates[i];
        std::size_t k = g.num_qubits();
        PauliString local(k);
        local.sign = p.sign;
        for (std::size_t j = 0; j < k; ++j) {
            local.xs.set(j, p.xs[support[j]]);
            local.zs.set(j, p.zs[support[j]]);
        }
        PauliString out = dir == Direction::Forward ? g.conjugate(local) : g.conjugate_inverse(local);
        p.sign = out.sign;
        for (std::size_t j = 0; j < k; ++j) {
            p.xs.set(support[j], out.xs[j]);
            p.zs.set(support[j], out.zs[j]);
        }
    };
    if (dir == Direction::Forward) {
        for (std::size_t i = 0; i < c.gates.size(); ++i) apply(i);
    } else {
        for (std::size_t i = c.gates.size(); i-- > 0;) apply(i);
    }
    return p;
}

/// Unsigned stabilizer generators D Z_q D^dag of D|0^n>, one row per q, stored as
/// [x words | z words] with `words_per_half` words each.
class StabilizerRows {
   public:
    StabilizerRows(std::size_t n) : n_(n), w_(words_for(n)), data_(n * 2 * words_for(n), 0) {
        for (std::size_t q = 0; q < n; ++q) set_bit(zrow(q), q, true);
    }

    std::size_t num_qubits() const { return n_; }
    std::size_t words_per_half() const { return w_; }
    word_t *xrow(std::size_t r) { return data_.data() + r * 2 * w_; }
    word_t *zrow(std::size_t r) { return xrow(r) + w_; }
    const word_t *xrow(std::size_t r) const { return data_.data() + r * 2 * w_; }
    const word_t *zrow(std::size_t r) const { return xrow(r) + w_; }

    PauliString row(std::size_t r) const {
        PauliString p(n_);
        std::copy(xrow(r), xrow(r) + w_, p.xs.data());
        std::copy(zrow(r), zrow(r) + w_, p.zs.data());
        return p;
    }

    /// Unsigned conjugation of every row by a gate on `support`.
    void apply(const CliffordGate &g, const std::vector<std::size_t> &support) {
        std::size_t k = g.num_qubits();
        std::size_t kw = words_for(k), vw = 2 * kw;
        std::vector<word_t> img(2 * k * vw, 0);
        for (std::size_t i = 0; i < 2 * k; ++i) {
            std::copy(g.image(i).xs.data(), g.image(i).xs.data() + kw, img.data() + i * vw);
            std::copy(g.image(i).zs.data(), g.image(i).zs.data() + kw, img.data() + i * vw + kw);
        }
        std::vector<word_t> mask(w_, 0);
        for (auto q : support) set_bit(mask.data(), q, true);
        std::vector<std::size_t> hit;
        for (std::size_t r = 0; r < n_; ++r) {
            const word_t *x = xrow(r), *z = zrow(r);
            for (std::size_t w = 0; w < w_; ++w) {
                if ((x[w] | z[w]) & mask[w]) {
                    hit.push_back(r);
                    break;
                }
            }
        }
        // Lookup tables over byte-sized chunks of the local input, built when enough rows are dense.
        const std::size_t chunks = (2 * k + 7) / 8;
        std::vector<word_t> table;
        auto build_table = [&] {
            table.assign(chunks * 256 * vw, 0);
            for (std::size_t ch = 0; ch < chunks; ++ch) {
                word_t *base = table.data() + ch * 256 * vw;
                for (std::size_t b = 1; b < 256; ++b) {
                    std::size_t low = static_cast<std::size_t>(std::countr_zero(b));
                    std::size_t idx = ch * 8 + low;
                    word_t *dst = base + b * vw;
                    std::copy(base + (b & (b - 1)) * vw, base + (b & (b - 1)) * vw + vw, dst);
                    if (idx < 2 * k) xor_words(dst, img.data() + idx * vw, vw);
                }
            }
        };
        BitRuns runs(support);
        std::vector<word_t> in(vw), out(vw);
        std::size_t dense_rows = 0;
        for (auto r : hit) {
            word_t *x = xrow(r), *z = zrow(r);
            std::fill(in.begin(), in.end(), 0);
            runs.gather(x, in.data(), 0);
            runs.gather(z, in.data(), k);
            std::size_t ones = popcount_words(in.data(), vw);
            std::fill(out.begin(), out.end(), 0);
            if (ones * 4 > chunks && k >= 16 && (table.size() || ++dense_rows >= 16)) {
                if (table.empty()) build_table();
                for (std::size_t ch = 0; ch < chunks; ++ch) {
                    std::size_t b = (in[(ch * 8) / 64] >> ((ch * 8) % 64)) & 0xFF;
                    if (b) xor_words(out.data(), table.data() + (ch * 256 + b) * vw, vw);
                }
            } else {
                for (std::size_t w = 0; w < vw; ++w) {
                    for (word_t m = in[w]; m; m &= m - 1) {
                        std::size_t i = w * 64 + static_cast<std::size_t>(std::countr_zero(m));
                        xor_words(out.data(), img.data() + i * vw, vw);
                    }
                }
            }
            runs.scatter(out.data(), x, 0);
            runs.scatter(out.data(), z, kw * 64);
        }
    }

   private:
    std::size_t n_, w_;
    std::vector<word_t> data_;
};

/// Unsigned generators of the stabilizer group of D|0^n>.
inline StabilizerRows stabilizer_rows(const CliffordCircuit &c) {
    StabilizerRows rows(c.num_qubits());
    for (std::size_t i = 0; i < c.gates.size(); ++i) rows.apply(c.gates[i], c.tmpl.slots[i].support);
    return rows;
}

/// Gates whose output can influence `targets`, plus every qubit they touch.
struct Lightcone {
    std::vector<std::size_t> qubits;
    std::vector<std::size_t> slot_indices;
};

inline Lightcone lightcone(const CircuitTemplate &t, const std::vector<std::size_t> &targets) {
    std::vector<bool> in(t.num_qubits(), false);
    for (auto q : targets) in.at(q) = true;
    Lightcone lc;
    for (std::size_t i = t.slots.size(); i-- > 0;) {
        const auto &s = t.slots[i].support;
        bool hit = std::any_of(s.begin(), s.end(), [&](std::size_t q) { return in[q]; });
        if (!hit) continue;
        for (auto q : s) in[q] = true;
        lc.slot_indices.push_back(i);
    }
    std::reverse(lc.slot_indices.begin(), lc.slot_indices.end());
    for (std::size_t q = 0; q < in.size(); ++q) {
        if (in[q]) lc.qubits.push_back(q);
    }
    return lc;
}

}  // namespace miesim

#endif
