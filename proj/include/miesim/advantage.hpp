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


// Locality-restricted classical output functions against states whose triple h, i, j shows
// GHZ-type measurement-induced entanglement. A function maps basis choices b in {0,1,2}^3
// (X, Y, Z on h, i, j) to an n-bit outcome; it fails on b when that outcome has zero amplitude.

#ifndef MIESIM_ADVANTAGE_HPP
#define MIESIM_ADVANTAGE_HPP

#include <array>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "miesim/ghz.hpp"

namespace miesim {

using BasisChoice = std::array<unsigned, 3>;  // 0, 1, 2 for X, Y, Z

/// Basis change from Z to X, Y or Z: Q(0) = (X+Z)/sqrt2, Q(1) = (Y+Z)/sqrt2, Q(2) = I.
inline const CliffordGate &basis_change(unsigned b) {
    static const std::array<CliffordGate, 3> q = {
        CliffordGate::named("H"),
        CliffordGate::from_images({PauliString::from_string("-X")}, {PauliString::from_string("+Y")}),
        CliffordGate::identity(1),
    };
    if (b > 2) throw std::invalid_argument("basis choice must be 0, 1 or 2");
    return q[b];
}

/// Whether <m| W(b) |psi> = 0. W(b) is applied to the triple, then every qubit is projected
/// onto its bit of m; a forced outcome of probability zero means a zero amplitude.
inline bool amplitude_is_zero(const StabilizerTableau &psi, const Triple &t, const BasisChoice &b,
                              const std::vector<std::uint8_t> &m) {
    std::size_t n = psi.num_qubits();
    check_triple(t, n);
    if (m.size() != n) throw std::invalid_argument("outcome length does not match the state");
    StabilizerTableau s = psi;
    for (std::size_t k = 0; k < 3; ++k) s.apply_gate(basis_change(b[k]), std::vector<std::size_t>{t[k]});
    for (std::size_t q = 0; q < n; ++q) {
        if (s.force_measure_z(q, m[q] != 0) == 0) return true;
    }
    return false;
}

/// Output function whose bits each read at most one of b_h, b_i, b_j.
struct LocalFunction {
    enum Tag : int { None = -1, H = 0, I = 1, J = 2 };
    struct Bit {
        int tag = None;
        std::array<std::uint8_t, 3> table{0, 0, 0};  // used when tagged
        std::uint8_t constant = 0;                   // used when untagged
    };
    std::vector<Bit> bits;

    std::size_t size() const { return bits.size(); }

    std::vector<std::uint8_t> operator()(const BasisChoice &b) const {
        std::vector<std::uint8_t> out(bits.size());
        for (std::size_t r = 0; r < bits.size(); ++r) {
            const auto &bit = bits[r];
            out[r] = bit.tag == None ? bit.constant : bit.table[b[static_cast<std::size_t>(bit.tag)]];
        }
        return out;
    }

    /// Throws unless the output bits of h, i and j read only their own input (or none).
    void validate(const Triple &t) const {
        for (std::size_t r = 0; r < bits.size(); ++r) {
            int tag = bits[r].tag;
            if (tag < None || tag > J) throw std::invalid_argument("bad dependency tag");
            for (std::size_t k = 0; k < 3; ++k) {
                if (r == t[k] && tag != None && tag != static_cast<int>(k)) {
                    throw std::invalid_argument("output bit " + std::to_string(r) + " of the triple reads another input");
                }
            }
        }
    }

    /// Three-bit function on the triple itself, with 3-entry truth tables packed as 3-bit codes.
    static LocalFunction triple_tables(unsigned th, unsigned ti, unsigned tj) {
        LocalFunction f;
        f.bits.resize(3);
        unsigned codes[3] = {th, ti, tj};
        for (std::size_t k = 0; k < 3; ++k) {
            f.bits[k].tag = static_cast<int>(k);
            for (std::size_t v = 0; v < 3; ++v) f.bits[k].table[v] = (codes[k] >> v) & 1;
        }
        return f;
    }

    static LocalFunction constant(const std::vector<std::uint8_t> &value) {
        LocalFunction f;
        f.bits.resize(value.size());
        for (std::size_t r = 0; r < value.size(); ++r) f.bits[r].constant = value[r];
        return f;
    }
};

inline BasisChoice basis_of_index(unsigned idx) { return {idx % 3, (idx / 3) % 3, idx / 9}; }

struct FailureReport {
    std::size_t failures = 0;  // out of 27
    bool precondition_ok = false;

    double rate() const { return static_cast<double>(failures) / 27.0; }
    /// rate >= 1/27, decided on integers.
    bool meets_bound() const { return failures >= 1; }
};

/// GHZ-type entanglement of the triple after measuring everything else. The unsigned
/// post-measurement group does not depend on the outcomes, so a fixed seed suffices.
inline bool has_ghz_type_mie(const StabilizerTableau &psi, const Triple &t) {
    Rng rng = make_rng(0);
    return is_ghz_type(postmeasurement_triple_state(psi, t, rng));
}

/// Fraction of the 27 basis choices on which f fails.
inline FailureReport failure_rate(const StabilizerTableau &psi, const Triple &t, const LocalFunction &f) {
    if (f.size() != psi.num_qubits()) throw std::invalid_argument("function length does not match the state");
    f.validate(t);
    FailureReport r;
    r.precondition_ok = has_ghz_type_mie(psi, t);
    for (unsigned idx = 0; idx < 27; ++idx) {
        BasisChoice b = basis_of_index(idx);
        r.failures += amplitude_is_zero(psi, t, b, f(b));
    }
    return r;
}

struct ExhaustiveResult {
    std::size_t functions = 0;
    std::size_t min_failures = 27;
    unsigned argmin = 0;  // th + 8 ti + 64 tj
    std::vector<std::size_t> failures;  // per function id

    double min_rate() const { return static_cast<double>(min_failures) / 27.0; }
};

/// All 8^3 = 512 local functions on a 3-qubit state with triple (0, 1, 2): each output bit is
/// one of the 8 maps {0,1,2} -> {0,1} of its own input. Constants are among them.
inline ExhaustiveResult exhaustive_minimum_failure(const StabilizerTableau &psi) {
    if (psi.num_qubits() != 3) throw std::invalid_argument("exhaustive search is defined on 3-qubit states");
    const Triple t{0, 1, 2};
    // Zero-amplitude table over (b, m) shared by all functions.
    std::array<std::array<bool, 8>, 27> zero{};
    for (unsigned idx = 0; idx < 27; ++idx) {
        for (unsigned m = 0; m < 8; ++m) {
            std::vector<std::uint8_t> bits{static_cast<std::uint8_t>(m & 1), static_cast<std::uint8_t>((m >> 1) & 1),
                                           static_cast<std::uint8_t>((m >> 2) & 1)};
            zero[idx][m] = amplitude_is_zero(psi, t, basis_of_index(idx), bits);
        }
    }
    ExhaustiveResult r;
    for (unsigned id = 0; id < 512; ++id) {
        auto f = LocalFunction::triple_tables(id & 7, (id >> 3) & 7, id >> 6);
        std::size_t fails = 0;
        for (unsigned idx = 0; idx < 27; ++idx) {
            auto out = f(basis_of_index(idx));
            fails += zero[idx][out[0] | out[1] << 1 | out[2] << 2];
        }
        r.failures.push_back(fails);
        ++r.functions;
        if (fails < r.min_failures) {
            r.min_failures = fails;
            r.argmin = id;
        }
    }
    return r;
}

inline void write_advantage_csv(std::ostream &os, const std::string &state, const ExhaustiveResult &r, bool header) {
    if (header) os << "state,function_id,rate\n";
    for (std::size_t id = 0; id < r.failures.size(); ++id) {
        os << state << ',' << id << ',' << static_cast<double>(r.failures[id]) / 27.0 << '\n';
    }
}

inline std::string advantage_summary(const std::string &state, const ExhaustiveResult &r) {
    return "# " + state + ": minimum failure rate " + std::to_string(r.min_failures) + "/27 over " +
           std::to_string(r.functions) + " functions (argmin " + std::to_string(r.argmin) + ")";
}

}  // namespace miesim

#endif
