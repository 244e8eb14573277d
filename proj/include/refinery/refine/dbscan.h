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

#ifndef REFINERY_REFINE_DBSCAN_H_
#define REFINERY_REFINE_DBSCAN_H_

#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "refinery/adapters/types.h"

namespace refinery::refine {

inline constexpr int kNoise = -1;

struct ClusterLabel {
  std::string candidate_id;
  int label = kNoise;  // >= 0, or kNoise

  friend bool operator==(const ClusterLabel&, const ClusterLabel&) = default;
};

struct DbscanOptions {
  double eps = 0.25;
  int min_pts = 2;
  bool parallel = true;  // neighbourhoods through the OpenMP kernel
};

// Density clustering under cosine distance 1 - a.b. A point is core when at
// least min_pts points, itself included, lie within eps (inclusive). Points
// are visited in ascending index order and clusters expand breadth-first over
// ascending neighbour indices, so a border point reachable from several
// clusters joins the lowest-numbered one. Cluster ids are dense from 0 in
// order of discovery. Vectors must be unit-norm (within 1e-6).
absl::StatusOr<std::vector<int>> Dbscan(std::span<const adapters::EmbeddingVector> vectors,
                                        const DbscanOptions& options);

}  // namespace refinery::refine

#endif  // REFINERY_REFINE_DBSCAN_H_
