// Copyright 2026 The privminer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Data-parallel inner loops of the pipeline. Every kernel has an OpenMP
// version (the default, used by the library) and a single-threaded
// reference in `kernels::serial`. Both call the same per-row arithmetic, so
// results are bitwise identical; the tests and bench/ compare the two.

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace privminer {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace kernels {

/// out[i] = cos(query, docs.row(i)); 0 for a zero row. The caller checks
/// that the query is nonzero.
void cosine_scores(std::span<const double> query, const RowMatrix& docs, std::span<double> out);

/// For each point, index of the nearest centroid by squared Euclidean
/// distance (lowest index on ties) and that distance.
void assign_nearest(const RowMatrix& points, const RowMatrix& centroids,
                    std::span<int> labels, std::span<double> sq_dist);

/// Boolean sliding-window counts restricted to `num_words` tracked words.
/// Documents are sequences of word ids, -1 for untracked tokens.
struct WindowCounts {
    std::uint64_t total_windows = 0;
    std::vector<std::uint64_t> single;   // [num_words]
    std::vector<std::uint64_t> pair;     // [num_words * num_words], symmetric

    bool operator==(const WindowCounts&) const = default;
};

WindowCounts window_counts(const std::vector<std::vector<int>>& docs, std::size_t num_words,
                           std::size_t window_size);

namespace serial {

void cosine_scores(std::span<const double> query, const RowMatrix& docs, std::span<double> out);
void assign_nearest(const RowMatrix& points, const RowMatrix& centroids,
                    std::span<int> labels, std::span<double> sq_dist);
WindowCounts window_counts(const std::vector<std::vector<int>>& docs, std::size_t num_words,
                           std::size_t window_size);

} // namespace serial
} // namespace kernels
} // namespace privminer
