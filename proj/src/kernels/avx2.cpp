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

// Compiled with -mavx2 only (no FMA) so every lane rounds exactly like the
// scalar reference.

#include <immintrin.h>

#include "impl.hpp"

namespace fatkit::kernels::avx2 {

namespace {

inline __m256d abs_pd(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

inline __m256d mismatch(__m256d a, __m256d b, __m256d one) {
  return _mm256_and_pd(_mm256_cmp_pd(a, b, _CMP_NEQ_UQ), one);
}

}  // namespace

void gower_to_many(const ReferenceBlock& block, const double* query, double* out) {
  const std::size_t rows = block.rows;
  const std::size_t nf = block.features();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d denom = _mm256_set1_pd(static_cast<double>(nf));
  std::size_t r = 0;
  for (; r + 4 <= rows; r += 4) {
    __m256d sum = _mm256_setzero_pd();
    for (std::size_t f = 0; f < nf; ++f) {
      const __m256d a = _mm256_set1_pd(query[f]);
      const __m256d b = _mm256_loadu_pd(block.feature(f) + r);
      __m256d c;
      if (block.categorical[f] || !(block.ranges[f] > 0.0)) {
        c = mismatch(a, b, one);
      } else {
        const __m256d d = abs_pd(_mm256_sub_pd(a, b));
        c = _mm256_min_pd(_mm256_div_pd(d, _mm256_set1_pd(block.ranges[f])), one);
      }
      sum = _mm256_add_pd(sum, c);
    }
    _mm256_storeu_pd(out + r, _mm256_div_pd(sum, denom));
  }
  scalar::gower_rows(block, query, out, r, rows);
}

void euclid_overlap_to_many(const ReferenceBlock& block, const double* query, double* out) {
  const std::size_t rows = block.rows;
  const std::size_t nf = block.features();
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t r = 0;
  for (; r + 4 <= rows; r += 4) {
    __m256d sum = _mm256_setzero_pd();
    for (std::size_t f = 0; f < nf; ++f) {
      const __m256d a = _mm256_set1_pd(query[f]);
      const __m256d b = _mm256_loadu_pd(block.feature(f) + r);
      if (block.categorical[f]) {
        sum = _mm256_add_pd(sum, mismatch(a, b, one));
      } else {
        const __m256d d = _mm256_sub_pd(a, b);
        sum = _mm256_add_pd(sum, _mm256_mul_pd(d, d));
      }
    }
    _mm256_storeu_pd(out + r, _mm256_sqrt_pd(sum));
  }
  scalar::euclid_overlap_rows(block, query, out, r, rows);
}

void weighted_gram(const double* x, std::size_t rows, std::size_t cols, const double* w,
                   double* gram) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = x + r * cols;
    for (std::size_t i = 0; i < cols; ++i) {
      const double s = w[r] * xr[i];
      const __m256d sv = _mm256_set1_pd(s);
      double* g = gram + i * cols;
      std::size_t j = 0;
      for (; j + 4 <= cols; j += 4) {
        const __m256d acc = _mm256_loadu_pd(g + j);
        _mm256_storeu_pd(g + j, _mm256_add_pd(acc, _mm256_mul_pd(sv, _mm256_loadu_pd(xr + j))));
      }
      for (; j < cols; ++j) g[j] += s * xr[j];
    }
  }
}

void weighted_xty(const double* x, std::size_t rows, std::size_t cols, const double* w,
                  const double* y, double* out) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double s = w[r] * y[r];
    const __m256d sv = _mm256_set1_pd(s);
    const double* xr = x + r * cols;
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4) {
      const __m256d acc = _mm256_loadu_pd(out + j);
      _mm256_storeu_pd(out + j, _mm256_add_pd(acc, _mm256_mul_pd(sv, _mm256_loadu_pd(xr + j))));
    }
    for (; j < cols; ++j) out[j] += s * xr[j];
  }
}

}  // namespace fatkit::kernels::avx2
