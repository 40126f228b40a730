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

#ifndef MIESIM_ARCHITECTURES_HPP
#define MIESIM_ARCHITECTURES_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "miesim/circuit.hpp"
#include "miesim/clifford_sampling.hpp"

namespace miesim {

/// Four edge colourings of the grid, applied cyclically: vertical edges starting on even rows,
/// vertical edges starting on odd rows, then the same for horizontal edges and columns.
inline CircuitTemplate brickwork_template(std::size_t rows, std::size_t cols, std::size_t depth) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("grid must be non-empty");
    CircuitTemplate t;
    t.grid = {rows, cols};
    t.depth = depth;
    for (std::size_t layer = 0; layer < depth; ++layer) {
        std::size_t colour = layer % 4;
        bool vertical = colour < 2;
        std::size_t parity = colour % 2;
        if (vertical) {
            for (std::size_t r = parity; r + 1 < rows; r += 2) {
                for (std::size_t c = 0; c < cols; ++c) t.slots.push_back({layer, {t.grid.index(r, c), t.grid.index(r + 1, c)}});
            }
        } else {
            for (std::size_t r = 0; r < rows; ++r) {
                for (std::size_t c = parity; c + 1 < cols; c += 2) {
                    t.slots.push_back({layer, {t.grid.index(r, c), t.grid.index(r, c + 1)}});
                }
            }
        }
    }
    return t;
}

namespace detail {

inline std::vector<std::size_t> block_support(const GridGeometry &g, std::size_t r0, std::size_t c0, std::size_t tau) {
    std::vector<std::size_t> s;
    s.reserve(tau * tau);
    for (std::size_t r = 0; r < tau; ++r) {
        for (std::size_t c = 0; c < tau; ++c) s.push_back(g.index(r0 + r, c0 + c));
    }
    return s;
}

inline void check_coarse(std::size_t m, std::size_t tau) {
    if (m < 2) throw std::invalid_argument("coarse-grained architecture needs m >= 2");
    if (tau < 2 || tau % 2) throw std::invalid_argument("coarse-grained architecture needs even tau >= 2");
}

}  // namespace detail

/// Two layers of tau x tau block gates on an (m tau) x (m tau) grid. The first layer has
/// (m-1)^2 blocks offset by (tau/2, tau/2); the second has m^2 aligned blocks.
inline CircuitTemplate coarse_grained_template(std::size_t m, std::size_t tau) {
    detail::check_coarse(m, tau);
    CircuitTemplate t;
    t.grid = {m * tau, m * tau};
    t.depth = 2;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        for (std::size_t j = 0; j + 1 < m; ++j) {
            t.slots.push_back({0, detail::block_support(t.grid, tau / 2 + i * tau, tau / 2 + j * tau, tau)});
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) t.slots.push_back({1, detail::block_support(t.grid, i * tau, j * tau, tau)});
    }
    return t;
}

/// Depth used when compiling each block gate into a snake brickwork.
inline std::size_t default_snake_depth(std::size_t tau) {
    return static_cast<std::size_t>(std::ceil(5.0 * static_cast<double>(tau * tau)));
}

/// Boustrophedon order of a block: left to right on even rows, right to left on odd rows.
inline std::vector<std::size_t> snake_path(const GridGeometry &g, std::size_t r0, std::size_t c0, std::size_t tau) {
    std::vector<std::size_t> p;
    for (std::size_t r = 0; r < tau; ++r) {
        for (std::size_t c = 0; c < tau; ++c) p.push_back(g.index(r0 + r, c0 + (r % 2 ? tau - 1 - c : c)));
    }
    return p;
}

/// Coarse-grained layout with every block gate replaced by a depth-`snake_depth` 1D brickwork of
/// two-qubit gates along the block's snake path.
inline CircuitTemplate compiled_coarse_grained_template(std::size_t m, std::size_t tau, std::size_t snake_depth) {
    detail::check_coarse(m, tau);
    if (snake_depth == 0) throw std::invalid_argument("snake depth must be positive");
    CircuitTemplate coarse = coarse_grained_template(m, tau);
    CircuitTemplate t;
    t.grid = coarse.grid;
    t.depth = 2 * snake_depth;
    for (std::size_t block_layer = 0; block_layer < 2; ++block_layer) {
        std::vector<std::vector<std::size_t>> paths;
        for (const auto &s : coarse.slots) {
            if (s.layer != block_layer) continue;
            std::size_t r0 = t.grid.row(s.support.front()), c0 = t.grid.col(s.support.front());
            paths.push_back(snake_path(t.grid, r0, c0, tau));
        }
        for (std::size_t sub = 0; sub < snake_depth; ++sub) {
            std::size_t layer = block_layer * snake_depth + sub;
            for (const auto &p : paths) {
                for (std::size_t a = sub % 2; a + 1 < p.size(); a += 2) t.slots.push_back({layer, {p[a], p[a + 1]}});
            }
        }
    }
    return t;
}

enum class SamplerPolicy { Uniform, Identity };

/// Fills every slot with a gate drawn from the policy using a generator seeded by `seed`.
inline CliffordCircuit instantiate(const CircuitTemplate &t, SamplerPolicy policy, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    CliffordCircuit c;
    c.tmpl = t;
    c.gates.reserve(t.slots.size());
    for (const auto &s : t.slots) {
        std::size_t k = s.support.size();
        c.gates.push_back(policy == SamplerPolicy::Uniform ? sample_uniform_clifford(k, rng) : CliffordGate::identity(k));
    }
    return c;
}

/// Uniform gates on 1 to 3 random distinct qubits of a 1 x n grid, `gates` of them.
inline CliffordCircuit random_clifford_circuit(std::size_t n, std::size_t gates, Rng &rng) {
    auto c = empty_circuit(1, n);
    for (std::size_t g = 0; g < gates; ++g) {
        std::size_t k = 1 + uniform_below(rng, std::min<std::size_t>(3, n));
        std::vector<std::size_t> qs;
        while (qs.size() < k) {
            std::size_t q = uniform_below(rng, n);
            if (std::find(qs.begin(), qs.end(), q) == qs.end()) qs.push_back(q);
        }
        append_gate(c, sample_uniform_clifford(k, rng), qs);
    }
    return c;
}

/// Architecture family and parameters, as named in configs and CSV output.
struct ArchitectureSpec {
    std::string kind;  // "brickwork", "coarse", "compiled"
    std::size_t rows = 0, cols = 0, depth = 0;
    std::size_t m = 0, tau = 0, snake_depth = 0;

    CircuitTemplate build() const {
        if (kind == "brickwork") return brickwork_template(rows, cols, depth);
        if (kind == "coarse") return coarse_grained_template(m, tau);
        if (kind == "compiled") {
            return compiled_coarse_grained_template(m, tau, snake_depth ? snake_depth : default_snake_depth(tau));
        }
        throw std::invalid_argument("unknown architecture '" + kind + "'");
    }

    std::string label() const {
        if (kind == "brickwork") return "brickwork(" + std::to_string(rows) + "x" + std::to_string(cols) + ",d=" + std::to_string(depth) + ")";
        std::string s = kind + "(m=" + std::to_string(m) + ",tau=" + std::to_string(tau);
        if (kind == "compiled") s += ",snake=" + std::to_string(snake_depth ? snake_depth : default_snake_depth(tau));
        return s + ")";
    }
};

}  // namespace miesim

#endif
