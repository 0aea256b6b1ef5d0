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

#pragma once

#include <cstddef>

#include "fatkit/kernels/kernels.hpp"

namespace fatkit::kernels {

namespace scalar {
void gower_rows(const ReferenceBlock& block, const double* query, double* out,
                std::size_t begin, std::size_t end);
void euclid_overlap_rows(const ReferenceBlock& block, const double* query, double* out,
                         std::size_t begin, std::size_t end);
void weighted_gram(const double* x, std::size_t rows, std::size_t cols, const double* w,
                   double* gram);
void weighted_xty(const double* x, std::size_t rows, std::size_t cols, const double* w,
                  const double* y, double* out);
}  // namespace scalar

#if defined(FATKIT_HAVE_AVX2)
namespace avx2 {
void gower_to_many(const ReferenceBlock& block, const double* query, double* out);
void euclid_overlap_to_many(const ReferenceBlock& block, const double* query, double* out);
void weighted_gram(const double* x, std::size_t rows, std::size_t cols, const double* w,
                   double* gram);
void weighted_xty(const double* x, std::size_t rows, std::size_t cols, const double* w,
                  const double* y, double* out);
}  // namespace avx2
#endif

}  // namespace fatkit::kernels
