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


// Small exact statevector simulator. Qubit q is bit q of the basis index.

#ifndef MIESIM_DENSE_HPP
#define MIESIM_DENSE_HPP

#include <bit>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "miesim/architectures.hpp"
#include "miesim/circuit.hpp"
#include "miesim/tableau.hpp"

namespace miesim {

using cplx = std::complex<double>;

constexpr std::size_t kDenseCap = 20;
constexpr std::size_t kMaxUnitaryQubits = 4;
constexpr std::size_t kMaxMarginalQubits = 16;
constexpr std::size_t kMaxPurityRegion = 10;
constexpr double kUnitarityTol = 1e-10;

/// Square complex matrix, row-major.
struct DenseMatrix {
    std::size_t dim = 0;
    std::vector<cplx> a;

    explicit DenseMatrix(std::size_t d = 0) : dim(d), a(d * d) {}
    cplx &operator()(std::size_t r, std::size_t c) { return a[r * dim + c]; }
    cplx operator()(std::size_t r, std::size_t c) const { return a[r * dim + c]; }

    /// max |(U U^dag - I)_ij|
    double unitarity_error() const {
        double err = 0;
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                cplx s = 0;
                for (std::size_t k = 0; k < dim; ++k) s += a[i * dim + k] * std::conj(a[j * dim + k]);
                err = std::max(err, std::abs(s - cplx(i == j ? 1.0 : 0.0)));
            }
        }
        return err;
    }
};

class DenseState {
   public:
    explicit DenseState(std::size_t n, std::size_t cap = kDenseCap) : n_(n) {
        if (n > cap || n > kDenseCap) throw std::length_error("dense state exceeds the qubit cap");
        amps_.assign(std::size_t{1} << n, 0);
        amps_[0] = 1;
    }

    std::size_t num_qubits() const { return n_; }
    const std::vector<cplx> &amplitudes() const { return amps_; }
    std::vector<cplx> &amplitudes() { return amps_; }

    double norm_squared() const {
        double s = 0;
        for (auto v : amps_) s += std::norm(v);
        return s;
    }

    std::vector<double> probabilities() const {
        std::vector<double> p(amps_.size());
        for (std::size_t i = 0; i < amps_.size(); ++i) p[i] = std::norm(amps_[i]);
        return p;
    }

   private:
    std::size_t n_;
    std::vector<cplx> amps_;
};

/// Applies a 2^k x 2^k unitary to the listed qubits (support[0] is local bit 0).
inline void apply_unitary(DenseState &s, const DenseMatrix &u, const std::vector<std::size_t> &support) {
    std::size_t k = support.size();
    if (k == 0 || k > kMaxUnitaryQubits) throw std::invalid_argument("unitary must act on 1 to 4 qubits");
    if (u.dim != (std::size_t{1} << k)) throw std::invalid_argument("matrix size does not match support");
    for (std::size_t i = 0; i < k; ++i) {
        if (support[i] >= s.num_qubits()) throw std::out_of_range("unitary support out of range");
        for (std::size_t j = 0; j < i; ++j) {
            if (support[i] == support[j]) throw std::invalid_argument("repeated qubit in support");
        }
    }
    if (u.unitarity_error() > kUnitarityTol) throw std::invalid_argument("matrix is not unitary");
    std::size_t mask = 0;
    for (auto q : support) mask |= std::size_t{1} << q;
    std::size_t d = u.dim;
    std::vector<std::size_t> offs(d);
    for (std::size_t l = 0; l < d; ++l) {
        std::size_t o = 0;
        for (std::size_t j = 0; j < k; ++j) o |= ((l >> j) & 1) << support[j];
        offs[l] = o;
    }
    auto &amp = s.amplitudes();
    std::vector<cplx> in(d);
    for (std::size_t base = 0; base < amp.size(); ++base) {
        if (base & mask) continue;
        for (std::size_t l = 0; l < d; ++l) in[l] = amp[base | offs[l]];
        for (std::size_t r = 0; r < d; ++r) {
            cplx v = 0;
            for (std::size_t c = 0; c < d; ++c) v += u(r, c) * in[c];
            amp[base | offs[r]] = v;
        }
    }
}

/// P |psi> for a signed Hermitian Pauli string.
inline std::vector<cplx> apply_pauli(const std::vector<cplx> &psi, const PauliString &p) {
    std::size_t n = p.num_qubits();
    if (psi.size() != (std::size_t{1} << n)) throw std::invalid_argument("Pauli width does not match vector");
    std::size_t xm = 0, zm = 0;
    for (std::size_t q = 0; q < n; ++q) {
        xm |= std::size_t{p.xs[q]} << q;
        zm |= std::size_t{p.zs[q]} << q;
    }
    // Each Y = i X Z.
    static const cplx kI[4] = {1, cplx(0, 1), -1, cplx(0, -1)};
    cplx phase = kI[std::popcount(xm & zm) & 3] * (p.sign ? -1.0 : 1.0);
    std::vector<cplx> out(psi.size());
    for (std::size_t b = 0; b < psi.size(); ++b) {
        double z = (std::popcount(b & zm) & 1) ? -1.0 : 1.0;
        out[b ^ xm] = phase * z * psi[b];
    }
    return out;
}

inline cplx inner(const std::vector<cplx> &a, const std::vector<cplx> &b) {
    cplx s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline double expectation(const DenseState &s, const PauliString &p) {
    return inner(s.amplitudes(), apply_pauli(s.amplitudes(), p)).real();
}

/// Unitary of a Clifford gate with the global phase fixed by <0|U|0> real and positive (or the
/// first nonzero entry of U|0> when that vanishes).
inline DenseMatrix clifford_matrix(const CliffordGate &g) {
    std::size_t k = g.num_qubits();
    if (k > kMaxUnitaryQubits) throw std::invalid_argument("Clifford matrix limited to 4 qubits");
    std::size_t d = std::size_t{1} << k;
    // U|0> is the joint +1 eigenvector of the Z images.
    std::vector<cplx> psi0;
    for (std::size_t seed = 0; seed < d && psi0.empty(); ++seed) {
        std::vector<cplx> v(d, 0);
        v[seed] = 1;
        for (std::size_t j = 0; j < k; ++j) {
            auto pv = apply_pauli(v, g.z_image(j));
            for (std::size_t i = 0; i < d; ++i) v[i] = 0.5 * (v[i] + pv[i]);
        }
        double nrm = std::sqrt(inner(v, v).real());
        if (nrm < 1e-6) continue;
        std::size_t lead = 0;
        while (std::abs(v[lead]) < 1e-9) ++lead;
        cplx ph = std::conj(v[lead]) / std::abs(v[lead]);
        for (auto &x : v) x *= ph / nrm;
        psi0 = std::move(v);
    }
    DenseMatrix u(d);
    for (std::size_t col = 0; col < d; ++col) {
        // U|x> = U X^x U^dag U|0> = prod_j Ximg_j^{x_j} U|0>.
        std::vector<cplx> v = psi0;
        for (std::size_t j = k; j-- > 0;) {
            if ((col >> j) & 1) v = apply_pauli(v, g.x_image(j));
        }
        for (std::size_t r = 0; r < d; ++r) u(r, col) = v[r];
    }
    return u;
}

/// Runs a Clifford circuit (gates of at most 4 qubits) on |0^n>.
inline DenseState run_dense(const CliffordCircuit &c, std::size_t cap = kDenseCap) {
    DenseState s(c.num_qubits(), cap);
    for (std::size_t i = 0; i < c.gates.size(); ++i) apply_unitary(s, clifford_matrix(c.gates[i]), c.tmpl.slots[i].support);
    return s;
}

/// Pr[x_subset = v], with bit j of the index holding the outcome of subset[j].
inline std::vector<double> marginal_distribution(const DenseState &s, const std::vector<std::size_t> &subset) {
    if (subset.size() > kMaxMarginalQubits) throw std::length_error("marginal subset exceeds 16 qubits");
    for (auto q : subset) {
        if (q >= s.num_qubits()) throw std::out_of_range("marginal qubit out of range");
    }
    std::vector<double> out(std::size_t{1} << subset.size(), 0.0);
    const auto &amp = s.amplitudes();
    for (std::size_t b = 0; b < amp.size(); ++b) {
        double p = std::norm(amp[b]);
        if (p == 0) continue;
        std::size_t idx = 0;
        for (std::size_t j = 0; j < subset.size(); ++j) idx |= ((b >> subset[j]) & 1) << j;
        out[idx] += p;
    }
    return out;
}

/// Tr(rho_R^2) from the Schmidt matrix M (rows indexed by R, columns by the rest).
inline double reduced_purity(const DenseState &s, const std::vector<std::size_t> &region) {
    if (region.size() > kMaxPurityRegion) throw std::length_error("purity region exceeds 10 qubits");
    std::size_t n = s.num_qubits(), r = region.size();
    std::size_t rmask = 0;
    for (auto q : region) {
        if (q >= n) throw std::out_of_range("region qubit out of range");
        if (rmask >> q & 1) throw std::invalid_argument("repeated qubit in region");
        rmask |= std::size_t{1} << q;
    }
    std::size_t dr = std::size_t{1} << r, dc = std::size_t{1} << (n - r);
    std::vector<std::size_t> rest;
    for (std::size_t q = 0; q < n; ++q) {
        if (!(rmask >> q & 1)) rest.push_back(q);
    }
    std::vector<cplx> m(dr * dc);
    const auto &amp = s.amplitudes();
    for (std::size_t b = 0; b < amp.size(); ++b) {
        std::size_t i = 0, j = 0;
        for (std::size_t t = 0; t < r; ++t) i |= ((b >> region[t]) & 1) << t;
        for (std::size_t t = 0; t < rest.size(); ++t) j |= ((b >> rest[t]) & 1) << t;
        m[i * dc + j] = amp[b];
    }
    double purity = 0;
    for (std::size_t i = 0; i < dr; ++i) {
        for (std::size_t k = 0; k < dr; ++k) {
            cplx rho = 0;
            for (std::size_t j = 0; j < dc; ++j) rho += m[i * dc + j] * std::conj(m[k * dc + j]);
            purity += std::norm(rho);
        }
    }
    return purity;
}

/// Full Z-basis output distribution of a stabilizer state, by enumerating every branch of
/// sequential forced measurements. Index bit q is the outcome of qubit q.
inline std::vector<double> stabilizer_output_distribution(const StabilizerTableau &state) {
    std::size_t n = state.num_qubits();
    if (n > kDenseCap) throw std::length_error("output distribution exceeds the qubit cap");
    std::vector<double> out(std::size_t{1} << n, 0.0);
    std::function<void(StabilizerTableau &, std::size_t, std::size_t, double)> rec =
        [&](StabilizerTableau &t, std::size_t q, std::size_t bits, double p) {
            if (q == n) {
                out[bits] += p;
                return;
            }
            if (auto det = t.peek_z(q)) {
                rec(t, q + 1, bits | (std::size_t{*det} << q), p);
                return;
            }
            for (bool v : {false, true}) {
                StabilizerTableau branch = t;
                double pv = branch.force_measure_z(q, v);
                rec(branch, q + 1, bits | (std::size_t{v} << q), p * pv);
            }
        };
    StabilizerTableau copy = state;
    rec(copy, 0, 0, 1.0);
    return out;
}

/// Sum |p_i - q_i| / 2.
inline double total_variation(const std::vector<double> &p, const std::vector<double> &q) {
    if (p.size() != q.size()) throw std::invalid_argument("distribution sizes differ");
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
    return s / 2;
}

struct EngineEquivalenceReport {
    std::size_t circuits = 0;
    double max_tvd = 0;
    double max_purity_diff = 0;
    double max_norm_error = 0;

    bool pass() const { return circuits > 0 && max_tvd < 1e-9 && max_purity_diff < 1e-9 && max_norm_error < 1e-10; }
};

/// Random circuits on 2..max_qubits qubits with 3n gates, run on both engines. Compares the full
/// output distributions and the purity of a random region of at most kMaxPurityRegion qubits.
inline EngineEquivalenceReport engine_equivalence_check(std::size_t circuits, std::size_t max_qubits, std::uint64_t seed) {
    if (max_qubits < 2 || max_qubits > kDenseCap) throw std::invalid_argument("max_qubits must lie in [2, 20]");
    EngineEquivalenceReport r;
    for (std::size_t i = 0; i < circuits; ++i) {
        Rng rng = trial_rng(seed, "engine-equivalence", i);
        std::size_t n = 2 + uniform_below(rng, max_qubits - 1);
        auto c = random_clifford_circuit(n, 3 * n, rng);
        auto dense = run_dense(c);
        auto tab = run_circuit(c);
        r.max_tvd = std::max(r.max_tvd, total_variation(dense.probabilities(), stabilizer_output_distribution(tab)));
        std::vector<std::size_t> region;
        for (std::size_t q = 0; q < n; ++q)
            if (uniform_below(rng, 2) && region.size() < kMaxPurityRegion) region.push_back(q);
        if (region.empty()) region.push_back(uniform_below(rng, n));
        r.max_purity_diff =
            std::max(r.max_purity_diff, std::abs(reduced_purity(dense, region) - tab.region_purity(region).to_double()));
        r.max_norm_error = std::max(r.max_norm_error, std::abs(dense.norm_squared() - 1));
        ++r.circuits;
    }
    return r;
}

}  // namespace miesim

#endif
