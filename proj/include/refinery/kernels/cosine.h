// Copyright 2026 The Refinery Authors
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

#ifndef REFINERY_KERNELS_COSINE_H_
#define REFINERY_KERNELS_COSINE_H_

// Data-parallel similarity kernels. Every kernel has a serial reference
// version and an OpenMP version; both evaluate each dot product with the same
// sequential summation, so their outputs are bit-identical and the serial
// version doubles as the test oracle for the parallel one.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "refinery/adapters/types.h"

namespace refinery::kernels {

// Row-major n x dim matrix.
struct DenseRows {
  std::vector<double> data;
  std::size_t rows = 0;
  std::size_t dim = 0;

  const double* row(std::size_t i) const { return data.data() + i * dim; }
};

// Packs equally sized embeddings into a matrix. Returns an empty matrix with
// dim = 0 for empty input; mixed dimensions are a caller bug and abort.
DenseRows Pack(std::span<const adapters::EmbeddingVector> vectors);

inline double Dot(const double* a, const double* b, std::size_t dim) {
  double sum = 0.0;
  for (std::size_t k = 0; k < dim; ++k) sum += a[k] * b[k];
  return sum;
}

// Cosine distance between unit vectors, 1 - a.b.
inline double CosineDistance(const double* a, const double* b, std::size_t dim) {
  return 1.0 - Dot(a, b, dim);
}

using Neighborhoods = std::vector<std::vector<std::uint32_t>>;

// For each row i, the ascending indices j (including i itself) with
// CosineDistance(i, j) <= eps.
Neighborhoods NeighborhoodsSerial(const DenseRows& rows, double eps);
Neighborhoods NeighborhoodsParallel(const DenseRows& rows, double eps);

// out[i] = a.row(i) . b.row(i). Shapes must match.
std::vector<double> RowwiseDotSerial(const DenseRows& a, const DenseRows& b);
std::vector<double> RowwiseDotParallel(const DenseRows& a, const DenseRows& b);

int MaxThreads();

}  // namespace refinery::kernels

#endif  // REFINERY_KERNELS_COSINE_H_
