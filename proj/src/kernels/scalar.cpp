// Copyright 2026 The fatkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>

#include "impl.hpp"

namespace fatkit::kernels::scalar {

void gower_rows(const ReferenceBlock& block, const double* query, double* out,
                std::size_t begin, std::size_t end) {
  const std::size_t nf = block.features();
  const double denom = static_cast<double>(nf);
  for (std::size_t r = begin; r < end; ++r) {
    double sum = 0.0;
    for (std::size_t f = 0; f < nf; ++f) {
      const double a = query[f];
      const double b = block.feature(f)[r];
      double c;
      if (block.categorical[f] || !(block.ranges[f] > 0.0)) {
        c = a != b ? 1.0 : 0.0;
      } else {
        c = std::min(std::abs(a - b) / block.ranges[f], 1.0);
      }
      sum += c;
    }
    out[r] = sum / denom;
  }
}

void euclid_overlap_rows(const ReferenceBlock& block, const double* query, double* out,
                         std::size_t begin, std::size_t end) {
  const std::size_t nf = block.features();
  for (std::size_t r = begin; r < end; ++r) {
    double sum = 0.0;
    for (std::size_t f = 0; f < nf; ++f) {
      const double a = query[f];
      const double b = block.feature(f)[r];
      if (block.categorical[f]) {
        sum += a != b ? 1.0 : 0.0;
      } else {
        const double d = a - b;
        sum += d * d;
      }
    }
    out[r] = std::sqrt(sum);
  }
}

void weighted_gram(const double* x, std::size_t rows, std::size_t cols, const double* w,
                   double* gram) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = x + r * cols;
    for (std::size_t i = 0; i < cols; ++i) {
      const double s = w[r] * xr[i];
      double* g = gram + i * cols;
      for (std::size_t j = 0; j < cols; ++j) g[j] += s * xr[j];
    }
  }
}

void weighted_xty(const double* x, std::size_t rows, std::size_t cols, const double* w,
                  const double* y, double* out) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double s = w[r] * y[r];
    const double* xr = x + r * cols;
    for (std::size_t j = 0; j < cols; ++j) out[j] += s * xr[j];
  }
}

}  // namespace fatkit::kernels::scalar
