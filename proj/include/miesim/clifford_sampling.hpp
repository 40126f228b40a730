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

#ifndef MIESIM_CLIFFORD_SAMPLING_HPP
#define MIESIM_CLIFFORD_SAMPLING_HPP

#include <deque>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "miesim/clifford_gate.hpp"
#include "miesim/rng.hpp"

namespace miesim {

namespace detail {

inline void random_words(Rng &rng, word_t *w, std::size_t nbits) {
    std::size_t nw = words_for(nbits);
    for (std::size_t i = 0; i < nw; ++i) w[i] = rng();
    if (nbits % 64) w[nw - 1] &= (word_t{1} << (nbits % 64)) - 1;
}

}  // namespace detail

/// Uniformly random element of Sp(2k, 2), returned as 2k unsigned images (X_1..X_k, Z_1..Z_k).
///
/// Each step picks a uniformly random nonzero v in the symplectic complement of the pairs chosen
/// so far, then a uniformly random w in that complement with <v, w> = 1, and projects the
/// remaining basis onto the complement of span{v, w}.
inline std::vector<PauliString> sample_uniform_symplectic(std::size_t k, Rng &rng) {
    const std::size_t kw = words_for(k), vw = 2 * kw;
    // Basis vectors of the current complement: kw words of x followed by kw words of z.
    std::size_t count = 2 * k;
    std::vector<word_t> basis(count * vw, 0);
    for (std::size_t q = 0; q < k; ++q) {
        set_bit(basis.data() + q * vw, q, true);
        set_bit(basis.data() + (k + q) * vw + kw, q, true);
    }
    auto form = [kw](const word_t *a, const word_t *b) {
        word_t acc = 0;
        for (std::size_t i = 0; i < kw; ++i) acc ^= (a[i] & b[kw + i]) ^ (a[kw + i] & b[i]);
        return static_cast<bool>(std::popcount(acc) & 1);
    };
    std::vector<PauliString> xs(k, PauliString(k)), zs(k, PauliString(k));
    std::vector<word_t> v(vw), w(vw), c(words_for(2 * k)), d(words_for(2 * k));
    for (std::size_t step = 0; step < k; ++step) {
        do {
            detail::random_words(rng, c.data(), count);
        } while (!any_words(c.data(), words_for(count)));
        detail::random_words(rng, d.data(), count);
        std::fill(v.begin(), v.end(), 0);
        std::fill(w.begin(), w.end(), 0);
        for (std::size_t j = 0; j < count; ++j) {
            const word_t *b = basis.data() + j * vw;
            if (get_bit(c.data(), j)) xor_words(v.data(), b, vw);
            if (get_bit(d.data(), j)) xor_words(w.data(), b, vw);
        }
        if (!form(v.data(), w.data())) {
            // Translating by a fixed delta with <v, delta> = 1 is a bijection onto the <v, w> = 1 coset.
            std::size_t j = 0;
            while (!form(v.data(), basis.data() + j * vw)) ++j;
            xor_words(w.data(), basis.data() + j * vw, vw);
            flip_bit(d.data(), j);
        }
        std::copy(v.begin(), v.begin() + kw, xs[step].xs.data());
        std::copy(v.begin() + kw, v.end(), xs[step].zs.data());
        std::copy(w.begin(), w.begin() + kw, zs[step].xs.data());
        std::copy(w.begin() + kw, w.end(), zs[step].zs.data());
        if (step + 1 == k) break;

        // Indices j1, j2 whose projections depend on the others; every other projection is kept.
        std::size_t j1 = 0;
        while (!get_bit(c.data(), j1)) ++j1;
        bool dj1 = get_bit(d.data(), j1);
        std::size_t j2 = count;
        for (std::size_t j = 0; j < count; ++j) {
            if (j != j1 && get_bit(d.data(), j) != (dj1 && get_bit(c.data(), j))) {
                j2 = j;
                break;
            }
        }
        const word_t *vx = v.data(), *vz = v.data() + kw, *wx = w.data(), *wz = w.data() + kw;
        for (std::size_t j = 0; j < count; ++j) {
            if (j == j1 || j == j2) continue;
            word_t *ux = basis.data() + j * vw, *uz = ux + kw;
            word_t av = 0, aw = 0;
            for (std::size_t i = 0; i < kw; ++i) {
                av ^= (ux[i] & vz[i]) ^ (uz[i] & vx[i]);
                aw ^= (ux[i] & wz[i]) ^ (uz[i] & wx[i]);
            }
            word_t mv = std::popcount(aw) & 1 ? ~word_t{0} : 0;
            word_t mw = std::popcount(av) & 1 ? ~word_t{0} : 0;
            for (std::size_t i = 0; i < vw; ++i) ux[i] ^= (v[i] & mv) ^ (w[i] & mw);
        }
        for (std::size_t hole : {std::max(j1, j2), std::min(j1, j2)}) {
            --count;
            if (hole != count) std::copy(basis.data() + count * vw, basis.data() + (count + 1) * vw, basis.data() + hole * vw);
        }
    }
    std::vector<PauliString> images = std::move(xs);
    images.insert(images.end(), zs.begin(), zs.end());
    return images;
}

/// Uniformly random k-qubit Clifford (mod global phase).
inline CliffordGate sample_uniform_clifford(std::size_t k, Rng &rng) {
    auto images = sample_uniform_symplectic(k, rng);
    for (std::size_t i = 0; i < images.size(); i += 64) {
        word_t bits = rng();
        for (std::size_t j = i; j < std::min(images.size(), i + 64); ++j) images[j].sign = (bits >> (j - i)) & 1;
    }
    return CliffordGate::from_images_unchecked(k, std::move(images));
}

/// Uniformly random non-identity k-qubit Pauli with + sign.
inline PauliString sample_nonidentity_pauli(std::size_t k, Rng &rng) {
    if (k == 0) throw std::invalid_argument("no non-identity Pauli on zero qubits");
    PauliString p(k);
    do {
        detail::random_words(rng, p.xs.data(), k);
        detail::random_words(rng, p.zs.data(), k);
    } while (p.is_identity());
    return p;
}

/// Every element of the k-qubit Clifford group mod phase, for k <= 2 (24 and 11520 elements).
inline std::vector<CliffordGate> enumerate_clifford_group(std::size_t k) {
    if (k == 0 || k > 2) throw std::invalid_argument("enumeration supported for k in {1, 2}");
    std::vector<CliffordGate> gens;
    auto embed1 = [k](const CliffordGate &g1, std::size_t q) {
        std::vector<PauliString> xs, zs;
        for (std::size_t j = 0; j < k; ++j) {
            if (j == q) {
                PauliString a(k), b(k);
                a.xs.set(j, g1.x_image(0).xs[0]);
                a.zs.set(j, g1.x_image(0).zs[0]);
                a.sign = g1.x_image(0).sign;
                b.xs.set(j, g1.z_image(0).xs[0]);
                b.zs.set(j, g1.z_image(0).zs[0]);
                b.sign = g1.z_image(0).sign;
                xs.push_back(a);
                zs.push_back(b);
            } else {
                xs.push_back(PauliString::single(k, j, 'X'));
                zs.push_back(PauliString::single(k, j, 'Z'));
            }
        }
        return CliffordGate::from_images(xs, zs);
    };
    for (std::size_t q = 0; q < k; ++q) {
        gens.push_back(embed1(CliffordGate::named("H"), q));
        gens.push_back(embed1(CliffordGate::named("S"), q));
    }
    if (k == 2) gens.push_back(CliffordGate::named("CNOT"));
    std::unordered_set<CliffordGate> seen;
    std::vector<CliffordGate> out;
    std::deque<CliffordGate> frontier{CliffordGate::identity(k)};
    seen.insert(frontier.front());
    while (!frontier.empty()) {
        CliffordGate g = std::move(frontier.front());
        frontier.pop_front();
        for (const auto &h : gens) {
            CliffordGate n = g.then(h);
            if (seen.insert(n).second) frontier.push_back(n);
        }
        out.push_back(std::move(g));
    }
    return out;
}

}  // namespace miesim

#endif
