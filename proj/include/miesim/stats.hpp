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


#ifndef MIESIM_STATS_HPP
#define MIESIM_STATS_HPP

#include <cmath>
#include <vector>

namespace miesim {

/// Sample mean with its standard error.
struct Estimate {
    double mean = 0;
    double se = 0;
    std::size_t n = 0;
};

/// Two-pass mean and standard error, summed in index order so results are reproducible.
inline Estimate estimate_mean(const std::vector<double> &xs) {
    Estimate e;
    e.n = xs.size();
    if (xs.empty()) return e;
    double s = 0;
    for (double x : xs) s += x;
    e.mean = s / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0;
        for (double x : xs) ss += (x - e.mean) * (x - e.mean);
        e.se = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
    }
    return e;
}

/// Binomial frequency k / n with standard error sqrt(p (1 - p) / n).
inline Estimate estimate_rate(std::size_t k, std::size_t n) {
    Estimate e;
    e.n = n;
    if (n == 0) return e;
    e.mean = static_cast<double>(k) / static_cast<double>(n);
    e.se = std::sqrt(e.mean * (1 - e.mean) / static_cast<double>(n));
    return e;
}

}  // namespace miesim

#endif
