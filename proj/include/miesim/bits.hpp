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

#ifndef MIESIM_BITS_HPP
#define MIESIM_BITS_HPP

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace miesim {

using word_t = std::uint64_t;

constexpr std::size_t kWordBits = 64;

constexpr std::size_t words_for(std::size_t nbits) { return (nbits + kWordBits - 1) / kWordBits; }

inline bool get_bit(const word_t *w, std::size_t i) { return (w[i >> 6] >> (i & 63)) & 1u; }
inline void set_bit(word_t *w, std::size_t i, bool v) {
    word_t m = word_t{1} << (i & 63);
    if (v) {
        w[i >> 6] |= m;
    } else {
        w[i >> 6] &= ~m;
    }
}
inline void flip_bit(word_t *w, std::size_t i) { w[i >> 6] ^= word_t{1} << (i & 63); }

inline void xor_words(word_t *dst, const word_t *src, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] ^= src[i];
}

inline bool any_words(const word_t *w, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (w[i]) return true;
    }
    return false;
}

inline std::size_t popcount_words(const word_t *w, std::size_t n) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i) c += static_cast<std::size_t>(std::popcount(w[i]));
    return c;
}

/// Parity of popcount(a & b) over n words.
inline bool dot_words(const word_t *a, const word_t *b, std::size_t n) {
    word_t acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc ^= a[i] & b[i];
    return std::popcount(acc) & 1;
}

/// Bits [pos, pos + len) of w as the low bits of a word; len <= 64.
inline word_t extract_bits(const word_t *w, std::size_t pos, std::size_t len) {
    if (len == 0) return 0;
    std::size_t i = pos >> 6, o = pos & 63;
    word_t v = w[i] >> o;
    if (o + len > 64) v |= w[i + 1] << (64 - o);
    return len == 64 ? v : v & ((word_t{1} << len) - 1);
}

/// Overwrites bits [pos, pos + len) of w with the low bits of value; len <= 64.
inline void deposit_bits(word_t *w, std::size_t pos, std::size_t len, word_t value) {
    if (len == 0) return;
    word_t mask = len == 64 ? ~word_t{0} : (word_t{1} << len) - 1;
    value &= mask;
    std::size_t i = pos >> 6, o = pos & 63;
    w[i] = (w[i] & ~(mask << o)) | (value << o);
    if (o + len > 64) {
        std::size_t hi = o + len - 64;
        word_t m2 = (word_t{1} << hi) - 1;
        w[i + 1] = (w[i + 1] & ~m2) | (value >> (64 - o));
    }
}

inline void copy_bits(const word_t *src, std::size_t spos, word_t *dst, std::size_t dpos, std::size_t len) {
    while (len > 0) {
        std::size_t l = len < 64 ? len : 64;
        deposit_bits(dst, dpos, l, extract_bits(src, spos, l));
        spos += l;
        dpos += l;
        len -= l;
    }
}

/// Maximal runs where consecutive local indices map to consecutive global indices.
struct BitRuns {
    struct Run {
        std::size_t global, local, len;
    };
    std::vector<Run> runs;

    explicit BitRuns(const std::vector<std::size_t> &positions) {
        for (std::size_t j = 0; j < positions.size(); ++j) {
            if (!runs.empty() && runs.back().global + runs.back().len == positions[j] &&
                runs.back().local + runs.back().len == j) {
                ++runs.back().len;
            } else {
                runs.push_back({positions[j], j, 1});
            }
        }
    }

    /// local[local_off + j] = global[positions[j]].
    void gather(const word_t *global, word_t *local, std::size_t local_off = 0) const {
        for (const auto &r : runs) copy_bits(global, r.global, local, local_off + r.local, r.len);
    }
    /// global[positions[j]] = local[local_off + j].
    void scatter(const word_t *local, word_t *global, std::size_t local_off = 0) const {
        for (const auto &r : runs) copy_bits(local, local_off + r.local, global, r.global, r.len);
    }
};

/// Fixed-length bit vector packed in 64-bit words. Bits past size() are always zero.
class BitVector {
   public:
    BitVector() = default;
    explicit BitVector(std::size_t nbits) : nbits_(nbits), words_(words_for(nbits), 0) {}

    std::size_t size() const { return nbits_; }
    std::size_t num_words() const { return words_.size(); }
    word_t *data() { return words_.data(); }
    const word_t *data() const { return words_.data(); }

    bool operator[](std::size_t i) const { return get_bit(words_.data(), i); }
    bool get(std::size_t i) const {
        if (i >= nbits_) throw std::out_of_range("BitVector index out of range");
        return get_bit(words_.data(), i);
    }
    void set(std::size_t i, bool v = true) { set_bit(words_.data(), i, v); }
    void flip(std::size_t i) { flip_bit(words_.data(), i); }
    void clear() { std::fill(words_.begin(), words_.end(), 0); }

    bool any() const { return any_words(words_.data(), words_.size()); }
    bool none() const { return !any(); }
    std::size_t count() const { return popcount_words(words_.data(), words_.size()); }

    /// Index of the lowest set bit, or size() when empty.
    std::size_t first_set() const {
        for (std::size_t i = 0; i < words_.size(); ++i) {
            if (words_[i]) return i * kWordBits + static_cast<std::size_t>(std::countr_zero(words_[i]));
        }
        return nbits_;
    }

    BitVector &operator^=(const BitVector &o) {
        check_same(o);
        xor_words(words_.data(), o.words_.data(), words_.size());
        return *this;
    }
    BitVector &operator&=(const BitVector &o) {
        check_same(o);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
        return *this;
    }
    BitVector &operator|=(const BitVector &o) {
        check_same(o);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
        return *this;
    }
    friend BitVector operator^(BitVector a, const BitVector &b) { return a ^= b; }
    friend BitVector operator&(BitVector a, const BitVector &b) { return a &= b; }
    friend BitVector operator|(BitVector a, const BitVector &b) { return a |= b; }

    bool operator==(const BitVector &o) const = default;

    bool dot(const BitVector &o) const {
        check_same(o);
        return dot_words(words_.data(), o.words_.data(), words_.size());
    }

    std::vector<std::size_t> ones() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < words_.size(); ++i) {
            word_t w = words_[i];
            while (w) {
                out.push_back(i * kWordBits + static_cast<std::size_t>(std::countr_zero(w)));
                w &= w - 1;
            }
        }
        return out;
    }

    std::string to_string() const {
        std::string s(nbits_, '0');
        for (std::size_t i = 0; i < nbits_; ++i) {
            if ((*this)[i]) s[i] = '1';
        }
        return s;
    }

    std::size_t hash() const {
        std::size_t h = nbits_ * 0x9E3779B97F4A7C15ull;
        for (word_t w : words_) h = (h ^ w) * 0x100000001B3ull + (h >> 29);
        return h;
    }

   private:
    void check_same(const BitVector &o) const {
        if (o.nbits_ != nbits_) throw std::invalid_argument("BitVector size mismatch");
    }

    std::size_t nbits_ = 0;
    std::vector<word_t> words_;
};

/// In-place transpose of a 64x64 bit block stored as 64 words (row i = word i, bit j = column j).
inline void transpose64(word_t *a) {
    word_t m = 0x00000000FFFFFFFFull;
    for (std::size_t j = 32; j != 0; j >>= 1, m ^= (m << j)) {
        for (std::size_t k = 0; k < 64; k = ((k | j) + 1) & ~j) {
            word_t t = ((a[k] >> j) ^ a[k | j]) & m;
            a[k] ^= t << j;
            a[k | j] ^= t;
        }
    }
}

/// Transposes a bit matrix with `rows` rows of `src_stride` words into one with `cols` rows
/// of `dst_stride` words. Both dimensions are handled in 64-bit blocks.
inline void transpose_bits(const word_t *src, std::size_t rows, std::size_t src_stride, word_t *dst,
                           std::size_t cols, std::size_t dst_stride) {
    word_t block[64];
    std::size_t rb = words_for(rows), cb = words_for(cols);
    for (std::size_t bi = 0; bi < rb; ++bi) {
        for (std::size_t bj = 0; bj < cb; ++bj) {
            for (std::size_t r = 0; r < 64; ++r) {
                std::size_t row = bi * 64 + r;
                block[r] = row < rows ? src[row * src_stride + bj] : 0;
            }
            transpose64(block);
            for (std::size_t c = 0; c < 64; ++c) {
                std::size_t col = bj * 64 + c;
                if (col < cols) dst[col * dst_stride + bi] = block[c];
            }
        }
    }
}

}  // namespace miesim

template <>
struct std::hash<miesim::BitVector> {
    std::size_t operator()(const miesim::BitVector &b) const { return b.hash(); }
};

#endif
