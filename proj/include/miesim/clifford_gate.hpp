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

#ifndef MIESIM_CLIFFORD_GATE_HPP
#define MIESIM_CLIFFORD_GATE_HPP

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "miesim/gf2.hpp"
#include "miesim/pauli.hpp"

namespace miesim {

/// A k-qubit Clifford unitary (mod global phase), given by the images U X_j U^dag and
/// U Z_j U^dag of the local generators.
class CliffordGate {
   public:
    CliffordGate() = default;

    static CliffordGate identity(std::size_t k) {
        CliffordGate g;
        g.k_ = k;
        g.images_.reserve(2 * k);
        for (std::size_t j = 0; j < k; ++j) g.images_.push_back(PauliString::single(k, j, 'X'));
        for (std::size_t j = 0; j < k; ++j) g.images_.push_back(PauliString::single(k, j, 'Z'));
        return g;
    }

    /// Builds from images of X_1..X_k and Z_1..Z_k. Throws unless the result is a valid Clifford.
    static CliffordGate from_images(std::vector<PauliString> x_images, std::vector<PauliString> z_images) {
        if (x_images.size() != z_images.size()) throw std::invalid_argument("image count mismatch");
        CliffordGate g;
        g.k_ = x_images.size();
        g.images_ = std::move(x_images);
        g.images_.insert(g.images_.end(), z_images.begin(), z_images.end());
        for (const auto &p : g.images_) {
            if (p.num_qubits() != g.k_) throw std::invalid_argument("image width mismatch");
        }
        if (!g.is_valid()) throw std::invalid_argument("images do not satisfy the Pauli commutation relations");
        return g;
    }

    /// Builds without validation. Used by samplers whose output is valid by construction.
    static CliffordGate from_images_unchecked(std::size_t k, std::vector<PauliString> images) {
        CliffordGate g;
        g.k_ = k;
        g.images_ = std::move(images);
        return g;
    }

    /// Named gates: I, X, Y, Z, H, S, S_DAG, SQRT_X, CNOT (control first), CZ, SWAP.
    static CliffordGate named(std::string_view name) {
        auto one = [](const char *x, const char *z) {
            return from_images({PauliString::from_string(x)}, {PauliString::from_string(z)});
        };
        auto two = [](const char *x1, const char *x2, const char *z1, const char *z2) {
            return from_images({PauliString::from_string(x1), PauliString::from_string(x2)},
                               {PauliString::from_string(z1), PauliString::from_string(z2)});
        };
        if (name == "I") return identity(1);
        if (name == "X") return one("+X", "-Z");
        if (name == "Y") return one("-X", "-Z");
        if (name == "Z") return one("-X", "+Z");
        if (name == "H") return one("+Z", "+X");
        if (name == "S") return one("+Y", "+Z");
        if (name == "S_DAG") return one("-Y", "+Z");
        if (name == "SQRT_X") return one("+X", "-Y");
        if (name == "CNOT") return two("+XX", "+IX", "+ZI", "+ZZ");
        if (name == "CZ") return two("+XZ", "+ZX", "+ZI", "+IZ");
        if (name == "SWAP") return two("+IX", "+XI", "+IZ", "+ZI");
        throw std::invalid_argument("unknown gate name '" + std::string(name) + "'");
    }

    std::size_t num_qubits() const { return k_; }
    const PauliString &x_image(std::size_t j) const { return images_[j]; }
    const PauliString &z_image(std::size_t j) const { return images_[k_ + j]; }
    /// Image i in the order X_1..X_k, Z_1..Z_k.
    const PauliString &image(std::size_t i) const { return images_[i]; }
    const std::vector<PauliString> &images() const { return images_; }

    bool operator==(const CliffordGate &o) const = default;

    std::size_t hash() const {
        std::size_t h = k_;
        for (const auto &p : images_) h = h * 1000003u ^ p.hash();
        return h;
    }

    /// Checks the 2k images obey the canonical commutation relations, which also implies
    /// that their symplectic matrix is invertible.
    bool is_valid() const {
        if (images_.size() != 2 * k_) return false;
        for (std::size_t a = 0; a < 2 * k_; ++a) {
            if (images_[a].num_qubits() != k_) return false;
            for (std::size_t b = a + 1; b < 2 * k_; ++b) {
                bool expect_anti = (b == a + k_) && a < k_;
                if (images_[a].commutes(images_[b]) == expect_anti) return false;
            }
        }
        return true;
    }

    /// Symplectic matrix; row i is image i written as [x | z].
    GF2Matrix symplectic() const {
        GF2Matrix m(2 * k_, 2 * k_);
        for (std::size_t i = 0; i < 2 * k_; ++i) {
            for (std::size_t q = 0; q < k_; ++q) {
                m.set(i, q, images_[i].xs[q]);
                m.set(i, k_ + q, images_[i].zs[q]);
            }
        }
        return m;
    }

    /// U p U^dag for a k-qubit Pauli p.
    PauliString conjugate(const PauliString &p) const {
        if (p.num_qubits() != k_) throw std::invalid_argument("Pauli width does not match gate");
        PauliString acc(k_);
        acc.sign = p.sign;
        unsigned e = 0;
        for (std::size_t q = 0; q < k_; ++q) {
            bool x = p.xs[q], z = p.zs[q];
            if (x) e += acc.multiply_right(images_[q]);
            if (z) e += acc.multiply_right(images_[k_ + q]);
            if (x && z) e += 1;
        }
        if (e & 2) acc.sign = !acc.sign;
        return acc;
    }

    /// U^dag p U for a k-qubit Pauli p.
    PauliString conjugate_inverse(const PauliString &p) const {
        if (p.num_qubits() != k_) throw std::invalid_argument("Pauli width does not match gate");
        PauliString q(k_);
        for (std::size_t j = 0; j < k_; ++j) {
            q.xs.set(j, !p.commutes(images_[k_ + j]));
            q.zs.set(j, !p.commutes(images_[j]));
        }
        PauliString fwd = conjugate(q);
        q.sign = fwd.sign != p.sign;
        return q;
    }

    /// Gate that applies `*this` first and then `next`.
    CliffordGate then(const CliffordGate &next) const {
        if (next.k_ != k_) throw std::invalid_argument("gate width mismatch");
        CliffordGate g;
        g.k_ = k_;
        g.images_.reserve(2 * k_);
        for (const auto &p : images_) g.images_.push_back(next.conjugate(p));
        return g;
    }

    CliffordGate inverse() const {
        CliffordGate g;
        g.k_ = k_;
        g.images_.reserve(2 * k_);
        for (std::size_t j = 0; j < k_; ++j) g.images_.push_back(conjugate_inverse(PauliString::single(k_, j, 'X')));
        for (std::size_t j = 0; j < k_; ++j) g.images_.push_back(conjugate_inverse(PauliString::single(k_, j, 'Z')));
        return g;
    }

    /// Conjugates the restriction of `p` to `support` in place.
    void apply_to(PauliString &p, std::span<const std::size_t> support) const {
        if (support.size() != k_) throw std::invalid_argument("support size does not match gate");
        PauliString local(k_);
        local.sign = p.sign;
        for (std::size_t j = 0; j < k_; ++j) {
            local.xs.set(j, p.xs[support[j]]);
            local.zs.set(j, p.zs[support[j]]);
        }
        PauliString out = conjugate(local);
        p.sign = out.sign;
        for (std::size_t j = 0; j < k_; ++j) {
            p.xs.set(support[j], out.xs[j]);
            p.zs.set(support[j], out.zs[j]);
        }
    }

   private:
    std::size_t k_ = 0;
    std::vector<PauliString> images_;
};

}  // namespace miesim

template <>
struct std::hash<miesim::CliffordGate> {
    std::size_t operator()(const miesim::CliffordGate &g) const { return g.hash(); }
};

#endif
