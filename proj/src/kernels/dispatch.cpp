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

#include <cstdlib>
#include <string>

#include "fatkit/errors.hpp"
#include "impl.hpp"

namespace fatkit::kernels {

std::string_view to_string(Backend backend) {
  return backend == Backend::avx2 ? "avx2" : "scalar";
}

bool avx2_supported() {
#if defined(FATKIT_HAVE_AVX2)
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") != 0;
  }();
  return supported;
#else
  return false;
#endif
}

Backend default_backend() {
  static const Backend backend = [] {
    const char* env = std::getenv("FATKIT_KERNELS");
    if (env != nullptr && std::string(env) == "scalar") return Backend::scalar;
    return avx2_supported() ? Backend::avx2 : Backend::scalar;
  }();
  return backend;
}

namespace {

Backend resolve(Backend requested) {
  if (requested == Backend::avx2 && !avx2_supported()) {
    throw UnsupportedError("AVX2 kernels are not available on this machine");
  }
  return requested;
}

}  // namespace

ReferenceBlock make_block(const RowMatrix& rows, const FeatureSchema& schema,
                          std::span<const std::size_t> features) {
  ReferenceBlock block;
  block.rows = rows.rows();
  block.data.resize(features.size() * block.rows);
  for (std::size_t k = 0; k < features.size(); ++k) {
    const auto f = features[k];
    const auto& col = schema.column(f);
    block.categorical.push_back(col.categorical() ? 1 : 0);
    block.ranges.push_back(col.numeric() ? col.max - col.min : 0.0);
    double* dst = block.data.data() + k * block.rows;
    for (std::size_t r = 0; r < block.rows; ++r) dst[r] = rows(r, f);
  }
  return block;
}

std::vector<double> project(std::span<const double> row, std::span<const std::size_t> features) {
  std::vector<double> out(features.size());
  for (std::size_t k = 0; k < features.size(); ++k) out[k] = row[features[k]];
  return out;
}

void gower_to_many(const ReferenceBlock& block, std::span<const double> query,
                   std::span<double> out, Backend backend) {
  if (query.size() != block.features() || out.size() != block.rows) {
    throw ArgumentError("gower_to_many: shape mismatch");
  }
  if (block.features() == 0) throw ArgumentError("distance over an empty feature subset");
#if defined(FATKIT_HAVE_AVX2)
  if (resolve(backend) == Backend::avx2) {
    avx2::gower_to_many(block, query.data(), out.data());
    return;
  }
#else
  resolve(backend);
#endif
  scalar::gower_rows(block, query.data(), out.data(), 0, block.rows);
}

void euclid_overlap_to_many(const ReferenceBlock& block, std::span<const double> query,
                            std::span<double> out, Backend backend) {
  if (query.size() != block.features() || out.size() != block.rows) {
    throw ArgumentError("euclid_overlap_to_many: shape mismatch");
  }
#if defined(FATKIT_HAVE_AVX2)
  if (resolve(backend) == Backend::avx2) {
    avx2::euclid_overlap_to_many(block, query.data(), out.data());
    return;
  }
#else
  resolve(backend);
#endif
  scalar::euclid_overlap_rows(block, query.data(), out.data(), 0, block.rows);
}

void weighted_gram(std::span<const double> x, std::size_t rows, std::size_t cols,
                   std::span<const double> w, std::span<double> gram, Backend backend) {
  if (x.size() != rows * cols || w.size() != rows || gram.size() != cols * cols) {
    throw ArgumentError("weighted_gram: shape mismatch");
  }
#if defined(FATKIT_HAVE_AVX2)
  if (resolve(backend) == Backend::avx2) {
    avx2::weighted_gram(x.data(), rows, cols, w.data(), gram.data());
    return;
  }
#else
  resolve(backend);
#endif
  scalar::weighted_gram(x.data(), rows, cols, w.data(), gram.data());
}

void weighted_xty(std::span<const double> x, std::size_t rows, std::size_t cols,
                  std::span<const double> w, std::span<const double> y, std::span<double> out,
                  Backend backend) {
  if (x.size() != rows * cols || w.size() != rows || y.size() != rows || out.size() != cols) {
    throw ArgumentError("weighted_xty: shape mismatch");
  }
#if defined(FATKIT_HAVE_AVX2)
  if (resolve(backend) == Backend::avx2) {
    avx2::weighted_xty(x.data(), rows, cols, w.data(), y.data(), out.data());
    return;
  }
#else
  resolve(backend);
#endif
  scalar::weighted_xty(x.data(), rows, cols, w.data(), y.data(), out.data());
}

}  // namespace fatkit::kernels
