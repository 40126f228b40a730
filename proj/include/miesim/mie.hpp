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

#ifndef MIESIM_MIE_HPP
#define MIESIM_MIE_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "miesim/architectures.hpp"
#include "miesim/circuit.hpp"
#include "miesim/parallel.hpp"
#include "miesim/stats.hpp"

namespace miesim {

/// Disjoint qubit sets A, B (measured) and C covering the grid.
struct Tripartition {
    std::vector<std::size_t> A, B, C;

    void validate(std::size_t n) const {
        if (A.empty()) throw std::invalid_argument("region A must be non-empty");
        std::vector<int> seen(n, 0);
        for (const auto *part : {&A, &B, &C}) {
            for (auto q : *part) {
                if (q >= n) throw std::invalid_argument("tripartition qubit out of range");
                if (seen[q]++) throw std::invalid_argument("tripartition regions overlap");
            }
        }
        for (int s : seen) {
            if (!s) throw std::invalid_argument("tripartition does not cover every qubit");
        }
    }
};

inline std::size_t grid_center(const GridGeometry &g) { return g.index(g.rows / 2, g.cols / 2); }

/// A = {center}, B = the side-L square around it (clipped to the grid) minus A, C = the rest.
inline Tripartition square_tripartition(const GridGeometry &g, std::size_t center, std::size_t L) {
    if (center >= g.num_qubits()) throw std::out_of_range("center out of range");
    if (L % 2 == 0) throw std::invalid_argument("shield side L must be odd");
    Tripartition t;
    t.A = {center};
    for (std::size_t q = 0; q < g.num_qubits(); ++q) {
        if (q == center) continue;
        (g.distance(q, center) <= L / 2 ? t.B : t.C).push_back(q);
    }
    return t;
}

/// A = one uniform qubit; every other qubit lands in B with probability 2/3, else in C.
inline Tripartition random_tripartition(std::size_t n, Rng &rng) {
    Tripartition t;
    std::size_t a = uniform_below(rng, n);
    t.A = {a};
    for (std::size_t q = 0; q < n; ++q) {
        if (q == a) continue;
        (uniform_below(rng, 3) ? t.B : t.C).push_back(q);
    }
    return t;
}

/// A = central qubit, C = boundary ring of the grid, B = everything else.
inline Tripartition boundary_tripartition(const GridGeometry &g) {
    if (g.rows < 3 || g.cols < 3) throw std::invalid_argument("grid too small for a boundary ring");
    Tripartition t;
    std::size_t a = grid_center(g);
    t.A = {a};
    for (std::size_t q = 0; q < g.num_qubits(); ++q) {
        if (q == a) continue;
        std::size_t r = g.row(q), c = g.col(q);
        bool ring = r == 0 || c == 0 || r + 1 == g.rows || c + 1 == g.cols;
        (ring ? t.C : t.B).push_back(q);
    }
    return t;
}

/// Sizes of S_X, S_Y, S_Z as log2 values, with -1 for an empty set.
struct SSetSummary {
    int log2_size[3] = {-1, -1, -1};  // X, Y, Z
    std::size_t dim_h = 0;            // dimension of the subspace of s with A-part unrestricted

    bool is_empty() const { return log2_size[0] < 0 && log2_size[1] < 0 && log2_size[2] < 0; }
    double size(char p) const {
        int l = log2_size[p == 'X' ? 0 : p == 'Y' ? 1 : 2];
        return l < 0 ? 0.0 : std::ldexp(1.0, l);
    }
    double total() const { return size('X') + size('Y') + size('Z'); }
};

/// S for the unsigned stabilizer generators D Z_q D^dag. Requires |A| = 1.
///
/// The s with D Z(s) D^dag free of X on B, and of X and Z on C, form a subspace H. The A-part
/// restricted to H spans at most one non-identity Pauli P (two different ones would
/// anticommute), so S = S_P has 2^(dim H - 1) elements, or S is empty.
inline SSetSummary compute_S(const StabilizerRows &rows, const Tripartition &part) {
    std::size_t n = rows.num_qubits(), w = rows.words_per_half();
    part.validate(n);
    if (part.A.size() != 1) throw std::invalid_argument("S is defined for single-qubit A");
    std::size_t a = part.A[0];
    std::vector<word_t> not_a(w, 0), in_c(w, 0);
    for (auto q : part.B) set_bit(not_a.data(), q, true);
    for (auto q : part.C) {
        set_bit(not_a.data(), q, true);
        set_bit(in_c.data(), q, true);
    }
    EchelonBasis basis(2 * w * kWordBits, 2);
    std::vector<word_t> row(2 * w);
    SSetSummary out;
    word_t span = 0;
    for (std::size_t q = 0; q < n; ++q) {
        const word_t *x = rows.xrow(q), *z = rows.zrow(q);
        for (std::size_t i = 0; i < w; ++i) {
            row[i] = x[i] & not_a[i];
            row[w + i] = z[i] & in_c[i];
        }
        word_t payload = static_cast<word_t>(get_bit(x, a)) | static_cast<word_t>(get_bit(z, a)) << 1;
        if (basis.insert(row.data(), &payload)) continue;
        ++out.dim_h;
        if (payload) {
            if (span && span != payload) throw std::logic_error("H spans two distinct Paulis on A");
            span = payload;
        }
    }
    if (span) out.log2_size[span == 1 ? 0 : span == 3 ? 1 : 2] = static_cast<int>(out.dim_h) - 1;
    return out;
}

inline SSetSummary compute_S(const CliffordCircuit &c, const Tripartition &part) {
    return compute_S(stabilizer_rows(c), part);
}

/// Measurement-induced entanglement between A and C: S is empty.
inline bool mie_present(const CliffordCircuit &c, const Tripartition &part) { return compute_S(c, part).is_empty(); }

/// Purity of A after measuring every qubit of B in the given state.
inline Dyadic postmeasurement_purity(StabilizerTableau state, const Tripartition &part, Rng &rng) {
    for (auto q : part.B) state.measure_z(q, rng);
    return state.region_purity(part.A);
}

/// Runs the circuit on |0^n>, measures B and returns the purity of A.
inline Dyadic sampled_postmeasurement_purity(const CliffordCircuit &c, const Tripartition &part, Rng &rng) {
    part.validate(c.num_qubits());
    return postmeasurement_purity(run_circuit(c), part, rng);
}

enum class ScanGeometry { Boundary, Square };

/// One point of a purity scan.
struct MieScanRow {
    std::string arch;
    std::size_t d_or_tau = 0;
    std::size_t L = 0;
    std::string grid;
    std::size_t trials = 0;
    double mean_purity = 0;
    double se = 0;
    std::uint64_t seed = 0;
};

/// Scan over architecture parameters. For brickwork, `params` are depths and `grids` are odd
/// grid sides; for coarse/compiled, `params` are block sides tau and the grid is m tau.
/// Boundary geometry sets L = side - 2; square geometry uses each entry of `Ls`.
struct MieScanSpec {
    ArchitectureSpec arch;
    std::vector<std::size_t> params;
    std::vector<std::size_t> grids;
    std::vector<std::size_t> Ls;
    ScanGeometry geometry = ScanGeometry::Boundary;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
};

namespace detail {

inline std::string scan_tag(const ArchitectureSpec &a) { return "mie-scan/" + a.label(); }

inline MieScanRow scan_point(const ArchitectureSpec &a, const Tripartition &part, std::size_t param, std::size_t L,
                             std::size_t trials, std::uint64_t seed, std::size_t workers) {
    CircuitTemplate tmpl = a.build();
    std::string tag = scan_tag(a) + "/L=" + std::to_string(L);
    auto purities = parallel_map<double>(
        trials,
        [&](std::size_t i) {
            auto c = instantiate(tmpl, SamplerPolicy::Uniform, trial_seed(seed, tag, i));
            Rng rng = trial_rng(seed, tag + "/measure", i);
            return sampled_postmeasurement_purity(c, part, rng).to_double();
        },
        workers);
    auto e = estimate_mean(purities);
    return {a.kind, param, L, std::to_string(tmpl.grid.rows) + "x" + std::to_string(tmpl.grid.cols), trials, e.mean, e.se, seed};
}

}  // namespace detail

inline std::vector<MieScanRow> mie_scan(const MieScanSpec &spec, std::size_t workers = 0) {
    std::vector<MieScanRow> rows;
    bool brick = spec.arch.kind == "brickwork";
    for (std::size_t p : spec.params) {
        ArchitectureSpec a = spec.arch;
        (brick ? a.depth : a.tau) = p;
        std::vector<std::size_t> sides;
        if (brick && spec.geometry == ScanGeometry::Boundary) {
            sides = spec.grids;
        } else {
            sides = {brick ? a.rows : a.m * p};
        }
        for (std::size_t side : sides) {
            if (brick) a.rows = a.cols = side;
            GridGeometry g{brick ? a.rows : side, brick ? a.cols : side};
            if (spec.geometry == ScanGeometry::Boundary) {
                rows.push_back(detail::scan_point(a, boundary_tripartition(g), p, side - 2, spec.trials, spec.seed, workers));
            } else {
                for (std::size_t L : spec.Ls) {
                    rows.push_back(detail::scan_point(a, square_tripartition(g, grid_center(g), L), p, L, spec.trials,
                                                      spec.seed, workers));
                }
            }
        }
    }
    return rows;
}

/// Probability that every qubit of `region` reads 0, by a forced-outcome measurement cascade.
inline double zero_probability(StabilizerTableau state, const std::vector<std::size_t> &region) {
    double p = 1;
    for (auto q : region) {
        p *= state.force_measure_z(q, false);
        if (p == 0) return 0;
    }
    return p;
}

/// chi = 4^|AB| E[P_AB(0)^2] - 1 with its standard error.
struct ChiEstimate {
    double chi = 0;
    double se = 0;
    std::size_t trials = 0;
};

/// Haar value of chi: (2^|AB| - 1) / (2^n + 1).
inline double chi_haar(std::size_t ab, std::size_t n) {
    return (std::ldexp(1.0, static_cast<int>(ab)) - 1) / (std::ldexp(1.0, static_cast<int>(n)) + 1);
}

inline ChiEstimate chi_estimate(const CircuitTemplate &tmpl, const std::vector<std::size_t> &ab, std::size_t trials,
                                std::uint64_t seed, SamplerPolicy policy = SamplerPolicy::Uniform, std::size_t workers = 0) {
    if (ab.empty()) return {0, 0, trials};
    auto sq = parallel_map<double>(
        trials,
        [&](std::size_t i) {
            auto c = instantiate(tmpl, policy, trial_seed(seed, "chi", i));
            double p = zero_probability(run_circuit(c), ab);
            return p * p;
        },
        workers);
    auto e = estimate_mean(sq);
    double scale = std::ldexp(1.0, 2 * static_cast<int>(ab.size()));
    return {scale * e.mean - 1, scale * e.se, trials};
}

/// Left and right sides of the purity bound E[Tr rho_A^2] <= 1/2 + (1/2) sqrt(3 E|S|).
struct Theorem3Report {
    Estimate lhs;
    Estimate mean_S;
    double rhs = 0;
    double rhs_se = 0;
    bool pass = false;
    std::size_t mismatches = 0;  // trials where the measured purity disagreed with S
};

/// Estimates both sides from the same circuit instances. The pass criterion is
/// LHS <= RHS + 3 sqrt(se_lhs^2 + se_rhs^2), with se_rhs from the delta method.
inline Theorem3Report theorem3_bound_check(const CircuitTemplate &tmpl, const Tripartition &part, std::size_t trials,
                                           std::uint64_t seed, SamplerPolicy policy = SamplerPolicy::Uniform,
                                           std::size_t workers = 0) {
    part.validate(tmpl.num_qubits());
    struct Trial {
        double purity = 0, s = 0;
        bool mismatch = false;
    };
    auto results = parallel_map<Trial>(
        trials,
        [&](std::size_t i) {
            auto c = instantiate(tmpl, policy, trial_seed(seed, "theorem3", i));
            Rng rng = trial_rng(seed, "theorem3/measure", i);
            Trial t;
            t.purity = sampled_postmeasurement_purity(c, part, rng).to_double();
            auto S = compute_S(c, part);
            t.s = S.total();
            t.mismatch = (t.purity == 1.0) == S.is_empty();
            return t;
        },
        workers);
    std::vector<double> p, s;
    Theorem3Report r;
    for (const auto &t : results) {
        p.push_back(t.purity);
        s.push_back(t.s);
        r.mismatches += t.mismatch;
    }
    r.lhs = estimate_mean(p);
    r.mean_S = estimate_mean(s);
    r.rhs = 0.5 + 0.5 * std::sqrt(3 * r.mean_S.mean);
    r.rhs_se = r.mean_S.mean > 0 ? 0.75 / std::sqrt(3 * r.mean_S.mean) * r.mean_S.se : 0;
    r.pass = r.lhs.mean <= r.rhs + 3 * std::hypot(r.lhs.se, r.rhs_se);
    return r;
}

/// <0|D^dag Z_a D|0>^2 for one circuit: 1 if D^dag Z_a D is Z-type, else 0.
inline double z_expectation_squared(const CliffordCircuit &c, std::size_t a) {
    return conjugate_pauli(c, PauliString::single(c.num_qubits(), a, 'Z'), Direction::Backward).is_z_type() ? 1.0 : 0.0;
}

struct DepthBoundRow {
    std::size_t depth = 0;
    Estimate estimate;
    double bound = 0;  // (1/3) (2/5)^d
    bool pass = false;
};

/// Checks E[<0|D^dag Z_A D|0>^2] >= (1/3)(2/5)^d - 3 se on brickwork circuits with A at the centre.
inline std::vector<DepthBoundRow> chi_depth_lower_bound_check(std::size_t rows, std::size_t cols,
                                                              const std::vector<std::size_t> &depths, std::size_t trials,
                                                              std::uint64_t seed, std::size_t workers = 0) {
    std::vector<DepthBoundRow> out;
    for (std::size_t d : depths) {
        auto tmpl = brickwork_template(rows, cols, d);
        std::size_t a = grid_center(tmpl.grid);
        std::string tag = "chi-depth/d=" + std::to_string(d);
        auto v = parallel_map<double>(
            trials,
            [&](std::size_t i) {
                return z_expectation_squared(instantiate(tmpl, SamplerPolicy::Uniform, trial_seed(seed, tag, i)), a);
            },
            workers);
        DepthBoundRow r;
        r.depth = d;
        r.estimate = estimate_mean(v);
        r.bound = std::pow(0.4, static_cast<double>(d)) / 3;
        r.pass = r.estimate.mean >= r.bound - 3 * r.estimate.se;
        out.push_back(r);
    }
    return out;
}

struct Lemma1Report {
    std::size_t instances = 0, measurements = 0, exceptions = 0;
    std::size_t nonempty = 0;  // instances with S nonempty
    bool pass() const { return instances > 0 && exceptions == 0; }
};

/// Instance i uses archs[i mod |archs|] with a tripartition alternating between a centred
/// square of random odd side and a random split. Each instance is measured `repetitions`
/// times; an exception is a measured purity that is 1 while S is empty or vice versa.
inline Lemma1Report lemma1_check(const std::vector<ArchitectureSpec> &archs, std::size_t instances,
                                 std::size_t repetitions, std::uint64_t seed, std::size_t workers = 0) {
    if (archs.empty()) throw std::invalid_argument("lemma1 check needs at least one architecture");
    std::vector<CircuitTemplate> tmpls;
    for (const auto &a : archs) tmpls.push_back(a.build());
    struct Trial {
        std::size_t exceptions = 0;
        bool nonempty = false;
    };
    auto res = parallel_map<Trial>(
        instances,
        [&](std::size_t i) {
            const auto &t = tmpls[i % tmpls.size()];
            auto c = instantiate(t, SamplerPolicy::Uniform, trial_seed(seed, "lemma1", i));
            Rng rng = trial_rng(seed, "lemma1/measure", i);
            Tripartition part;
            if (i % 2 == 0) {
                std::size_t side = std::min(t.grid.rows, t.grid.cols);
                std::size_t L = 1 + 2 * uniform_below(rng, side / 2 + 1);
                part = square_tripartition(t.grid, uniform_below(rng, t.num_qubits()), L);
            } else {
                part = random_tripartition(t.num_qubits(), rng);
            }
            Trial tr;
            tr.nonempty = !compute_S(c, part).is_empty();
            auto state = run_circuit(c);
            for (std::size_t k = 0; k < repetitions; ++k) {
                bool pure = postmeasurement_purity(state, part, rng) == Dyadic::make(1, 0);
                tr.exceptions += pure != tr.nonempty;
            }
            return tr;
        },
        workers);
    Lemma1Report r;
    for (const auto &tr : res) {
        ++r.instances;
        r.measurements += repetitions;
        r.exceptions += tr.exceptions;
        r.nonempty += tr.nonempty;
    }
    return r;
}

/// 4 sum_C P_A(0)^2 over the 11520 two-qubit Cliffords applied to |00>, with A = qubit 0.
/// Each probability is 0, 1/2 or 1, so the sum is an exact integer; chi = four_sum / N - 1.
struct TwoDesignExhaustive {
    long long four_sum = 0;
    long long group_size = 0;
    double chi() const { return static_cast<double>(four_sum) / static_cast<double>(group_size) - 1; }
    /// chi == 1/5 exactly, i.e. 5 four_sum == 6 N.
    bool equals_one_fifth() const { return 5 * four_sum == 6 * group_size; }
};

inline TwoDesignExhaustive two_design_chi_exhaustive() {
    TwoDesignExhaustive r;
    for (const auto &g : enumerate_clifford_group(2)) {
        auto t = StabilizerTableau::from_gate(g);
        double p = t.force_measure_z(0, false);
        r.four_sum += std::lround(4 * p * p);
        ++r.group_size;
    }
    return r;
}

}  // namespace miesim

#endif
