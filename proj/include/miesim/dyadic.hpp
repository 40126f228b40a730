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

#ifndef MIESIM_DYADIC_HPP
#define MIESIM_DYADIC_HPP

#include <cmath>
#include <cstdint>
#include <string>

namespace miesim {

/// Exact value num / 2^log2_den, kept normalized (num odd or zero).
struct Dyadic {
    std::uint64_t num = 0;
    unsigned log2_den = 0;

    static Dyadic make(std::uint64_t num, unsigned log2_den) {
        Dyadic d{num, log2_den};
        d.normalize();
        return d;
    }
    static Dyadic pow2_neg(unsigned e) { return Dyadic{1, e}; }

    void normalize() {
        if (num == 0) {
            log2_den = 0;
            return;
        }
        while ((num & 1u) == 0 && log2_den > 0) {
            num >>= 1;
            --log2_den;
        }
    }

    double to_double() const { return std::ldexp(static_cast<double>(num), -static_cast<int>(log2_den)); }

    bool operator==(const Dyadic &o) const = default;

    std::string str() const {
        if (log2_den == 0) return std::to_string(num);
        return std::to_string(num) + "/2^" + std::to_string(log2_den);
    }
};

}  // namespace miesim

#endif
