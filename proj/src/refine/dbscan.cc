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

#include "refinery/refine/dbscan.h"

#include <cmath>
#include <deque>

#include "refinery/common/strings.h"
#include "refinery/kernels/cosine.h"

namespace refinery::refine {
namespace {

constexpr int kUnvisited = -2;

}  // namespace

absl::StatusOr<std::vector<int>> Dbscan(std::span<const adapters::EmbeddingVector> vectors,
                                        const DbscanOptions& options) {
  if (!(options.eps > 0.0)) return absl::InvalidArgumentError("eps must be positive");
  if (options.min_pts < 1) return absl::InvalidArgumentError("min_pts must be >= 1");
  if (vectors.empty()) return std::vector<int>{};
  const std::size_t dim = vectors.front().dimension();
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].dimension() != dim) {
      return absl::InvalidArgumentError(StrCat("vector ", i, " has dimension ",
                                               vectors[i].dimension(), ", expected ", dim));
    }
    double sq = 0.0;
    for (double v : vectors[i].values) sq += v * v;
    if (std::abs(std::sqrt(sq) - 1.0) > 1e-6) {
      return absl::InvalidArgumentError(StrCat("vector ", i, " is not unit-norm"));
    }
  }

  const kernels::DenseRows rows = kernels::Pack(vectors);
  const kernels::Neighborhoods hoods = options.parallel
                                           ? kernels::NeighborhoodsParallel(rows, options.eps)
                                           : kernels::NeighborhoodsSerial(rows, options.eps);
  const auto is_core = [&](std::size_t i) {
    return hoods[i].size() >= static_cast<std::size_t>(options.min_pts);
  };

  std::vector<int> labels(vectors.size(), kUnvisited);
  int next_cluster = 0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (labels[i] != kUnvisited) continue;
    if (!is_core(i)) {
      labels[i] = kNoise;  // may still be claimed as a border point
      continue;
    }
    const int cluster = next_cluster++;
    labels[i] = cluster;
    std::deque<std::uint32_t> frontier(hoods[i].begin(), hoods[i].end());
    while (!frontier.empty()) {
      const std::uint32_t q = frontier.front();
      frontier.pop_front();
      if (labels[q] == kNoise) labels[q] = cluster;
      if (labels[q] != kUnvisited) continue;
      labels[q] = cluster;
      if (is_core(q)) frontier.insert(frontier.end(), hoods[q].begin(), hoods[q].end());
    }
  }
  return labels;
}

}  // namespace refinery::refine
