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

// Line-oriented circuit text format.
//
//   # comment
//   QUBITS <n> GRID <rows> <cols>
//   DEPTH <d>                                 (optional; defaults to max layer + 1)
//   GATE <layer> <q1> ... <qk> | <hex>
//
// The hex payload is the gate's 2k images (X_1..X_k, Z_1..Z_k), each written as k x bits, k z
// bits and one sign bit. Rows are concatenated, packed most significant bit first into nibbles
// and zero padded to a whole nibble.

#ifndef MIESIM_CIRCUIT_IO_HPP
#define MIESIM_CIRCUIT_IO_HPP

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "miesim/circuit.hpp"

namespace miesim {

/// Parse failure with a 1-based line number.
class ParseError : public std::runtime_error {
   public:
    ParseError(std::size_t line, const std::string &msg)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    std::size_t line() const { return line_; }

   private:
    std::size_t line_;
};

namespace detail {

inline char hex_digit(unsigned v) { return "0123456789abcdef"[v & 15]; }

inline int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

inline std::string bits_to_hex(const std::vector<bool> &bits) {
    std::string s((bits.size() + 3) / 4, '0');
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) s[i / 4] = hex_digit(static_cast<unsigned>(hex_value(s[i / 4])) | (8u >> (i % 4)));
    }
    return s;
}

inline std::vector<bool> hex_to_bits(const std::string &hex, std::size_t nbits) {
    if (hex.size() != (nbits + 3) / 4) throw std::invalid_argument("hex payload has wrong length");
    std::vector<bool> bits(nbits);
    for (std::size_t i = 0; i < hex.size(); ++i) {
        int v = hex_value(hex[i]);
        if (v < 0) throw std::invalid_argument(std::string("bad hex digit '") + hex[i] + "'");
        for (std::size_t b = 0; b < 4; ++b) {
            std::size_t idx = i * 4 + b;
            bool bit = (v >> (3 - b)) & 1;
            if (idx < nbits) {
                bits[idx] = bit;
            } else if (bit) {
                throw std::invalid_argument("nonzero padding bits in hex payload");
            }
        }
    }
    return bits;
}

}  // namespace detail

inline std::string encode_gate_hex(const CliffordGate &g) {
    std::size_t k = g.num_qubits();
    std::vector<bool> bits;
    bits.reserve(2 * k * (2 * k + 1));
    for (std::size_t i = 0; i < 2 * k; ++i) {
        const PauliString &p = g.image(i);
        for (std::size_t j = 0; j < k; ++j) bits.push_back(p.xs[j]);
        for (std::size_t j = 0; j < k; ++j) bits.push_back(p.zs[j]);
        bits.push_back(p.sign);
    }
    return detail::bits_to_hex(bits);
}

/// Decodes and validates a k-qubit gate.
inline CliffordGate decode_gate_hex(std::size_t k, const std::string &hex) {
    auto bits = detail::hex_to_bits(hex, 2 * k * (2 * k + 1));
    std::vector<PauliString> images;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < 2 * k; ++i) {
        PauliString p(k);
        for (std::size_t j = 0; j < k; ++j) p.xs.set(j, bits[pos++]);
        for (std::size_t j = 0; j < k; ++j) p.zs.set(j, bits[pos++]);
        p.sign = bits[pos++];
        images.push_back(std::move(p));
    }
    auto g = CliffordGate::from_images_unchecked(k, std::move(images));
    if (!g.is_valid()) throw std::invalid_argument("gate images are not a valid Clifford");
    return g;
}

inline void write_circuit(std::ostream &os, const CliffordCircuit &c) {
    os << "QUBITS " << c.num_qubits() << " GRID " << c.tmpl.grid.rows << ' ' << c.tmpl.grid.cols << '\n';
    os << "DEPTH " << c.tmpl.depth << '\n';
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        const auto &s = c.tmpl.slots[i];
        os << "GATE " << s.layer;
        for (auto q : s.support) os << ' ' << q;
        os << " | " << encode_gate_hex(c.gates[i]) << '\n';
    }
}

inline std::string serialize_circuit(const CliffordCircuit &c) {
    std::ostringstream os;
    write_circuit(os, c);
    return os.str();
}

namespace detail {

inline std::size_t parse_index(const std::string &tok, std::size_t line) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
        throw ParseError(line, "expected a non-negative integer, got '" + tok + "'");
    }
    try {
        return std::stoull(tok);
    } catch (const std::out_of_range &) {
        throw ParseError(line, "integer out of range: '" + tok + "'");
    }
}

/// Splits "a b c | payload" into tokens before the bar and the trimmed payload.
inline std::pair<std::vector<std::string>, std::string> split_bar(const std::string &s) {
    auto bar = s.find('|');
    std::string head = bar == std::string::npos ? s : s.substr(0, bar);
    std::string tail = bar == std::string::npos ? "" : s.substr(bar + 1);
    std::istringstream hs(head), ts(tail);
    std::vector<std::string> toks;
    for (std::string t; hs >> t;) toks.push_back(t);
    std::string payload, extra;
    ts >> payload;
    if (ts >> extra) payload += " " + extra;
    return {toks, payload};
}

}  // namespace detail

/// Parses and validates a circuit. Errors carry the offending line number.
inline CliffordCircuit parse_circuit(std::istream &is) {
    CliffordCircuit c;
    bool have_header = false, have_depth = false;
    std::size_t max_layer = 0, lineno = 0;
    for (std::string raw; std::getline(is, raw);) {
        ++lineno;
        auto hash = raw.find('#');
        std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
        auto [toks, payload] = detail::split_bar(line);
        if (toks.empty()) {
            if (!payload.empty()) throw ParseError(lineno, "payload without a record");
            continue;
        }
        const std::string &kw = toks[0];
        if (kw == "QUBITS") {
            if (have_header) throw ParseError(lineno, "duplicate QUBITS header");
            if (toks.size() != 5 || toks[2] != "GRID") throw ParseError(lineno, "expected 'QUBITS n GRID rows cols'");
            std::size_t n = detail::parse_index(toks[1], lineno);
            c.tmpl.grid = {detail::parse_index(toks[3], lineno), detail::parse_index(toks[4], lineno)};
            if (c.tmpl.grid.num_qubits() != n || n == 0) throw ParseError(lineno, "qubit count does not match grid");
            have_header = true;
        } else if (kw == "DEPTH") {
            if (toks.size() != 2) throw ParseError(lineno, "expected 'DEPTH d'");
            c.tmpl.depth = detail::parse_index(toks[1], lineno);
            have_depth = true;
        } else if (kw == "GATE") {
            if (!have_header) throw ParseError(lineno, "GATE before QUBITS header");
            if (toks.size() < 3) throw ParseError(lineno, "GATE needs a layer and at least one qubit");
            if (payload.empty()) throw ParseError(lineno, "GATE is missing its '| hex' payload");
            GateSlot slot;
            slot.layer = detail::parse_index(toks[1], lineno);
            for (std::size_t i = 2; i < toks.size(); ++i) {
                std::size_t q = detail::parse_index(toks[i], lineno);
                if (q >= c.num_qubits()) throw ParseError(lineno, "qubit " + toks[i] + " out of range");
                slot.support.push_back(q);
            }
            try {
                c.gates.push_back(decode_gate_hex(slot.support.size(), payload));
            } catch (const std::invalid_argument &e) {
                throw ParseError(lineno, e.what());
            }
            max_layer = std::max(max_layer, slot.layer);
            c.tmpl.slots.push_back(std::move(slot));
        } else {
            throw ParseError(lineno, "unknown record '" + kw + "'");
        }
    }
    if (!have_header) throw ParseError(lineno, "missing QUBITS header");
    if (!have_depth) c.tmpl.depth = c.tmpl.slots.empty() ? 0 : max_layer + 1;
    try {
        c.validate();
    } catch (const std::invalid_argument &e) {
        throw ParseError(lineno, e.what());
    }
    return c;
}

inline CliffordCircuit parse_circuit(const std::string &text) {
    std::istringstream is(text);
    return parse_circuit(is);
}

inline CliffordCircuit load_circuit(const std::string &path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    return parse_circuit(f);
}

}  // namespace miesim

#endif
