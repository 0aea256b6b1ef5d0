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

// Data-parallel inner loops. Every kernel has a scalar reference and an AVX2
// variant that performs the same floating-point operations in the same order
// per output element, so the two backends agree bit-for-bit.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "fatkit/tabular.hpp"

namespace fatkit::kernels {

enum class Backend { scalar, avx2 };

std::string_view to_string(Backend backend);

// True when the CPU supports AVX2 and the AVX2 kernels were compiled in.
bool avx2_supported();

// AVX2 when available, unless FATKIT_KERNELS=scalar is set in the environment.
// Resolved once per process.
Backend default_backend();

// Feature-major copy of a set of reference rows restricted to a feature
// subset: value of feature f for row r is data[f * rows + r].
struct ReferenceBlock {
  std::size_t rows = 0;
  std::vector<double> data;
  std::vector<unsigned char> categorical;
  std::vector<double> ranges;  // max - min, numeric features only

  std::size_t features() const noexcept { return categorical.size(); }
  const double* feature(std::size_t f) const noexcept { return data.data() + f * rows; }
};

ReferenceBlock make_block(const RowMatrix& rows, const FeatureSchema& schema,
                          std::span<const std::size_t> features);

// Gather the block's features of a full encoded row.
std::vector<double> project(std::span<const double> row, std::span<const std::size_t> features);

// out[r] = mean over features of the Gower contribution between query and
// reference row r (same formula as fatkit::mixed_distance).
void gower_to_many(const ReferenceBlock& block, std::span<const double> query,
                   std::span<double> out, Backend backend = default_backend());

// out[r] = sqrt(sum of squared numeric differences + number of categorical
// mismatches) in raw feature units.
void euclid_overlap_to_many(const ReferenceBlock& block, std::span<const double> query,
                            std::span<double> out, Backend backend = default_backend());

// gram[i * cols + j] += sum_r (w[r] * x[r, i]) * x[r, j] over a row-major
// rows x cols matrix.
void weighted_gram(std::span<const double> x, std::size_t rows, std::size_t cols,
                   std::span<const double> w, std::span<double> gram,
                   Backend backend = default_backend());

// out[j] += sum_r (w[r] * y[r]) * x[r, j].
void weighted_xty(std::span<const double> x, std::size_t rows, std::size_t cols,
                  std::span<const double> w, std::span<const double> y, std::span<double> out,
                  Backend backend = default_backend());

}  // namespace fatkit::kernels
