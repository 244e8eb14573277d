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

#include "refinery/kernels/cosine.h"

#include <omp.h>

#include <cassert>
#include <cstdlib>

namespace refinery::kernels {

DenseRows Pack(std::span<const adapters::EmbeddingVector> vectors) {
  DenseRows out;
  if (vectors.empty()) return out;
  out.rows = vectors.size();
  out.dim = vectors.front().dimension();
  out.data.resize(out.rows * out.dim);
  for (std::size_t i = 0; i < out.rows; ++i) {
    if (vectors[i].dimension() != out.dim) std::abort();
    std::copy(vectors[i].values.begin(), vectors[i].values.end(),
              out.data.begin() + static_cast<std::ptrdiff_t>(i * out.dim));
  }
  return out;
}

Neighborhoods NeighborhoodsSerial(const DenseRows& rows, double eps) {
  Neighborhoods out(rows.rows);
  for (std::size_t i = 0; i < rows.rows; ++i) {
    for (std::size_t j = 0; j < rows.rows; ++j) {
      if (CosineDistance(rows.row(i), rows.row(j), rows.dim) <= eps) {
        out[i].push_back(static_cast<std::uint32_t>(j));
      }
    }
  }
  return out;
}

Neighborhoods NeighborhoodsParallel(const DenseRows& rows, double eps) {
  Neighborhoods out(rows.rows);
  const auto n = static_cast<std::int64_t>(rows.rows);
  // Each iteration owns out[i]; no merge step is needed.
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < n; ++i) {
    auto& hood = out[static_cast<std::size_t>(i)];
    const double* ri = rows.row(static_cast<std::size_t>(i));
    for (std::size_t j = 0; j < rows.rows; ++j) {
      if (CosineDistance(ri, rows.row(j), rows.dim) <= eps) {
        hood.push_back(static_cast<std::uint32_t>(j));
      }
    }
  }
  return out;
}

std::vector<double> RowwiseDotSerial(const DenseRows& a, const DenseRows& b) {
  assert(a.rows == b.rows && a.dim == b.dim);
  std::vector<double> out(a.rows);
  for (std::size_t i = 0; i < a.rows; ++i) out[i] = Dot(a.row(i), b.row(i), a.dim);
  return out;
}

std::vector<double> RowwiseDotParallel(const DenseRows& a, const DenseRows& b) {
  assert(a.rows == b.rows && a.dim == b.dim);
  std::vector<double> out(a.rows);
  const auto n = static_cast<std::int64_t>(a.rows);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(i);
    out[r] = Dot(a.row(r), b.row(r), a.dim);
  }
  return out;
}

int MaxThreads() { return omp_get_max_threads(); }

}  // namespace refinery::kernels
