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

#ifndef MIESIM_GF2_HPP
#define MIESIM_GF2_HPP

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "miesim/bits.hpp"

namespace miesim {

/// Dense matrix over GF(2), row-major, each row padded to whole words.
class GF2Matrix {
   public:
    GF2Matrix() = default;
    GF2Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), stride_(words_for(cols)), data_(rows * words_for(cols), 0) {}

    static GF2Matrix identity(std::size_t n) {
        GF2Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t stride() const { return stride_; }

    word_t *row(std::size_t r) { return data_.data() + r * stride_; }
    const word_t *row(std::size_t r) const { return data_.data() + r * stride_; }

    bool get(std::size_t r, std::size_t c) const { return get_bit(row(r), c); }
    void set(std::size_t r, std::size_t c, bool v) { set_bit(row(r), c, v); }

    BitVector row_vector(std::size_t r) const {
        BitVector v(cols_);
        std::copy(row(r), row(r) + stride_, v.data());
        return v;
    }
    void set_row(std::size_t r, const BitVector &v) {
        if (v.size() != cols_) throw std::invalid_argument("row size mismatch");
        std::copy(v.data(), v.data() + stride_, row(r));
    }
    void xor_row(std::size_t dst, std::size_t src) { xor_words(row(dst), row(src), stride_); }
    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        std::swap_ranges(row(a), row(a) + stride_, row(b));
    }

    bool operator==(const GF2Matrix &o) const = default;

    GF2Matrix transpose() const {
        GF2Matrix t(cols_, rows_);
        transpose_bits(data_.data(), rows_, stride_, t.data_.data(), cols_, t.stride_);
        return t;
    }

    GF2Matrix operator*(const GF2Matrix &o) const {
        if (cols_ != o.rows_) throw std::invalid_argument("GF2Matrix product shape mismatch");
        GF2Matrix out(rows_, o.cols_);
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t k = 0; k < cols_; ++k) {
                if (get(r, k)) xor_words(out.row(r), o.row(k), o.stride_);
            }
        }
        return out;
    }

    BitVector operator*(const BitVector &v) const {
        if (v.size() != cols_) throw std::invalid_argument("GF2Matrix-vector shape mismatch");
        BitVector out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) out.set(r, dot_words(row(r), v.data(), stride_));
        return out;
    }

    /// Reduced row echelon form in place. Returns the pivot column of each leading row.
    std::vector<std::size_t> rref() {
        std::vector<std::size_t> pivots;
        std::size_t r = 0;
        for (std::size_t c = 0; c < cols_ && r < rows_; ++c) {
            std::size_t p = r;
            while (p < rows_ && !get(p, c)) ++p;
            if (p == rows_) continue;
            swap_rows(p, r);
            for (std::size_t i = 0; i < rows_; ++i) {
                if (i != r && get(i, c)) xor_row(i, r);
            }
            pivots.push_back(c);
            ++r;
        }
        return pivots;
    }

    std::size_t rank() const {
        GF2Matrix m = *this;
        return m.rref().size();
    }

    /// Basis of { v : M v = 0 }.
    std::vector<BitVector> kernel() const {
        GF2Matrix m = *this;
        auto pivots = m.rref();
        std::vector<bool> is_pivot(cols_, false);
        for (auto c : pivots) is_pivot[c] = true;
        std::vector<BitVector> basis;
        for (std::size_t f = 0; f < cols_; ++f) {
            if (is_pivot[f]) continue;
            BitVector v(cols_);
            v.set(f);
            for (std::size_t i = 0; i < pivots.size(); ++i) {
                if (m.get(i, f)) v.set(pivots[i]);
            }
            basis.push_back(std::move(v));
        }
        return basis;
    }

    /// Some x with M x = b, if one exists.
    std::optional<BitVector> solve(const BitVector &b) const {
        if (b.size() != rows_) throw std::invalid_argument("rhs size mismatch");
        GF2Matrix aug(rows_, cols_ + 1);
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t c = 0; c < cols_; ++c) aug.set(r, c, get(r, c));
            aug.set(r, cols_, b[r]);
        }
        auto pivots = aug.rref();
        BitVector x(cols_);
        for (std::size_t i = 0; i < pivots.size(); ++i) {
            if (pivots[i] == cols_) return std::nullopt;
            x.set(pivots[i], aug.get(i, cols_));
        }
        return x;
    }

    std::optional<GF2Matrix> inverse() const {
        if (rows_ != cols_) return std::nullopt;
        std::size_t n = rows_;
        GF2Matrix aug(n, 2 * n);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) aug.set(r, c, get(r, c));
            aug.set(r, n + r, true);
        }
        auto pivots = aug.rref();
        if (pivots.size() < n || pivots[n - 1] != n - 1) return std::nullopt;
        GF2Matrix inv(n, n);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) inv.set(r, c, aug.get(r, n + c));
        }
        return inv;
    }

   private:
    std::size_t rows_ = 0, cols_ = 0, stride_ = 0;
    std::vector<word_t> data_;
};

/// Row-at-a-time echelon basis over GF(2) with a small payload carried along each row.
///
/// Rows are reduced by their lowest set bit. A row that reduces to zero yields its payload,
/// which then records the combination's value on coordinates excluded from elimination.
/// Each stored row tracks its last nonzero word, so sparse or banded inputs reduce quickly.
class EchelonBasis {
   public:
    EchelonBasis(std::size_t cols, std::size_t payload_bits)
        : cols_(cols), stride_(words_for(cols)), pstride_(words_for(payload_bits)),
          owner_(cols, -1) {}

    std::size_t cols() const { return cols_; }
    std::size_t stride() const { return stride_; }
    std::size_t payload_stride() const { return pstride_; }
    std::size_t rank() const { return his_.size(); }

    /// Reduces the row in place. Returns true and stores it if it was independent; otherwise
    /// the row is left zero and `payload` holds the accumulated combination payload.
    bool insert(word_t *row, word_t *payload) {
        std::size_t hi = stride_;
        while (hi > 0 && row[hi - 1] == 0) --hi;
        std::size_t w = 0;
        while (true) {
            while (w < hi && row[w] == 0) ++w;
            if (w >= hi) return false;
            std::size_t c = w * kWordBits + static_cast<std::size_t>(std::countr_zero(row[w]));
            int o = owner_[c];
            if (o < 0) {
                owner_[c] = static_cast<int>(his_.size());
                his_.push_back(hi);
                rows_.insert(rows_.end(), row, row + stride_);
                payloads_.insert(payloads_.end(), payload, payload + pstride_);
                return true;
            }
            std::size_t bhi = his_[static_cast<std::size_t>(o)];
            const word_t *b = rows_.data() + static_cast<std::size_t>(o) * stride_;
            for (std::size_t i = w; i < bhi; ++i) row[i] ^= b[i];
            xor_words(payload, payloads_.data() + static_cast<std::size_t>(o) * pstride_, pstride_);
            if (bhi > hi) hi = bhi;
        }
    }

    /// True when `row` lies in the span. The row is consumed.
    bool reduces_to_zero(word_t *row) {
        std::vector<word_t> scratch(pstride_, 0);
        std::size_t hi = stride_;
        while (hi > 0 && row[hi - 1] == 0) --hi;
        std::size_t w = 0;
        while (true) {
            while (w < hi && row[w] == 0) ++w;
            if (w >= hi) return true;
            std::size_t c = w * kWordBits + static_cast<std::size_t>(std::countr_zero(row[w]));
            int o = owner_[c];
            if (o < 0) return false;
            std::size_t bhi = his_[static_cast<std::size_t>(o)];
            const word_t *b = rows_.data() + static_cast<std::size_t>(o) * stride_;
            for (std::size_t i = w; i < bhi; ++i) row[i] ^= b[i];
            if (bhi > hi) hi = bhi;
        }
    }

   private:
    std::size_t cols_, stride_, pstride_;
    std::vector<int> owner_;
    std::vector<std::size_t> his_;
    std::vector<word_t> rows_;
    std::vector<word_t> payloads_;
};

}  // namespace miesim

#endif
