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

#ifndef MIESIM_PAULI_HPP
#define MIESIM_PAULI_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "miesim/bits.hpp"

namespace miesim {

/// Exponent e (mod 4) with P(x1,z1) P(x2,z2) = i^e P(x1^x2, z1^z2), where
/// P(x,z) = prod_q i^{x_q z_q} X^{x_q} Z^{z_q} is Hermitian.
inline unsigned product_phase(const word_t *x1, const word_t *z1, const word_t *x2, const word_t *z2,
                              std::size_t nwords) {
    std::size_t pos = 0, neg = 0;
    for (std::size_t i = 0; i < nwords; ++i) {
        word_t x3 = x1[i] ^ x2[i], z3 = z1[i] ^ z2[i];
        pos += static_cast<std::size_t>(std::popcount(x1[i] & z1[i])) +
               static_cast<std::size_t>(std::popcount(x2[i] & z2[i])) +
               2 * static_cast<std::size_t>(std::popcount(z1[i] & x2[i]));
        neg += static_cast<std::size_t>(std::popcount(x3 & z3));
    }
    return static_cast<unsigned>((pos + 4 * nwords * 64 - neg) & 3);
}

/// Parity of the symplectic form between two Paulis; true means they anticommute.
inline bool anticommutes_words(const word_t *x1, const word_t *z1, const word_t *x2, const word_t *z2,
                               std::size_t nwords) {
    word_t acc = 0;
    for (std::size_t i = 0; i < nwords; ++i) acc ^= (x1[i] & z2[i]) ^ (z1[i] & x2[i]);
    return std::popcount(acc) & 1;
}

/// Hermitian Pauli string: (-1)^sign * prod_q i^{x_q z_q} X^{x_q} Z^{z_q}.
class PauliString {
   public:
    PauliString() = default;
    explicit PauliString(std::size_t n) : xs(n), zs(n) {}

    BitVector xs;
    BitVector zs;
    bool sign = false;

    std::size_t num_qubits() const { return xs.size(); }

    static PauliString identity(std::size_t n) { return PauliString(n); }

    /// Parses "+XIZY", "-X_Z" or "XYZ". Accepts I or _ for identity.
    static PauliString from_string(std::string_view s) {
        bool neg = false;
        if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
            neg = s[0] == '-';
            s.remove_prefix(1);
        }
        PauliString p(s.size());
        p.sign = neg;
        for (std::size_t q = 0; q < s.size(); ++q) {
            switch (s[q]) {
                case 'I':
                case '_':
                    break;
                case 'X':
                    p.xs.set(q);
                    break;
                case 'Y':
                    p.xs.set(q);
                    p.zs.set(q);
                    break;
                case 'Z':
                    p.zs.set(q);
                    break;
                default:
                    throw std::invalid_argument("bad Pauli character '" + std::string(1, s[q]) + "'");
            }
        }
        return p;
    }

    /// Single-qubit Pauli ('X', 'Y' or 'Z') acting on qubit q of n.
    static PauliString single(std::size_t n, std::size_t q, char which) {
        PauliString p(n);
        p.set(q, which);
        return p;
    }

    char get(std::size_t q) const {
        static constexpr char kNames[4] = {'I', 'X', 'Z', 'Y'};
        return kNames[xs[q] + 2 * zs[q]];
    }
    void set(std::size_t q, char which) {
        xs.set(q, which == 'X' || which == 'Y');
        zs.set(q, which == 'Z' || which == 'Y');
        if (which != 'I' && which != 'X' && which != 'Y' && which != 'Z') {
            throw std::invalid_argument("bad Pauli character");
        }
    }

    std::string str() const {
        std::string s(1, sign ? '-' : '+');
        for (std::size_t q = 0; q < num_qubits(); ++q) s.push_back(get(q));
        return s;
    }

    std::size_t weight() const { return (xs | zs).count(); }
    bool is_identity() const { return xs.none() && zs.none(); }
    bool is_z_type() const { return xs.none(); }

    std::vector<std::size_t> support() const { return (xs | zs).ones(); }

    bool commutes(const PauliString &o) const {
        check(o);
        return !anticommutes_words(xs.data(), zs.data(), o.xs.data(), o.zs.data(), xs.num_words());
    }

    /// this <- this * rhs. Returns the leftover power of i (odd when the two anticommute).
    unsigned multiply_right(const PauliString &rhs) {
        check(rhs);
        unsigned e = product_phase(xs.data(), zs.data(), rhs.xs.data(), rhs.zs.data(), xs.num_words());
        xs ^= rhs.xs;
        zs ^= rhs.zs;
        sign ^= rhs.sign;
        if (e & 2) sign = !sign;
        return e & 1;
    }

    /// Product of two commuting Paulis.
    friend PauliString operator*(PauliString a, const PauliString &b) {
        if (a.multiply_right(b)) throw std::invalid_argument("product of anticommuting Paulis is not Hermitian");
        return a;
    }

    bool operator==(const PauliString &o) const = default;
    bool equal_up_to_sign(const PauliString &o) const { return xs == o.xs && zs == o.zs; }

    std::size_t hash() const { return xs.hash() * 31 + zs.hash() * 7 + sign; }

   private:
    void check(const PauliString &o) const {
        if (o.num_qubits() != num_qubits()) throw std::invalid_argument("Pauli size mismatch");
    }
};

}  // namespace miesim

#endif
