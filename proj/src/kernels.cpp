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

#include "privminer/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace privminer::kernels {

namespace {

inline double row_cosine(const double* q, double q_norm, const double* row, std::size_t n)
{
    double d = 0.0;
    double rr = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        d += q[j] * row[j];
        rr += row[j] * row[j];
    }
    if (rr == 0.0) {
        return 0.0;
    }
    return std::clamp(d / (q_norm * std::sqrt(rr)), -1.0, 1.0);
}

inline double query_norm(std::span<const double> q)
{
    double s = 0.0;
    for (double x : q) {
        s += x * x;
    }
    return std::sqrt(s);
}

inline void nearest_one(const double* x, const RowMatrix& centroids, std::size_t dim, int& label,
                        double& best)
{
    best = std::numeric_limits<double>::infinity();
    label = 0;
    for (Eigen::Index k = 0; k < centroids.rows(); ++k) {
        const double* c = centroids.data() + k * centroids.cols();
        double d = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            const double diff = x[j] - c[j];
            d += diff * diff;
        }
        if (d < best) {
            best = d;
            label = static_cast<int>(k);
        }
    }
}

// Counts the windows of one document into `out`. A nonempty document
// shorter than the window yields exactly one window; an empty one none.
void count_doc(const std::vector<int>& doc, std::size_t num_words, std::size_t window_size,
               std::vector<int>& in_window, WindowCounts& out)
{
    const std::size_t n = doc.size();
    if (n == 0) {
        return;
    }
    const std::size_t windows = n <= window_size ? 1 : n - window_size + 1;
    const std::size_t span = std::min(n, window_size);
    std::fill(in_window.begin(), in_window.end(), 0);
    for (std::size_t i = 0; i < span; ++i) {
        if (doc[i] >= 0) {
            ++in_window[doc[i]];
        }
    }
    std::vector<std::size_t> present;
    present.reserve(num_words);
    for (std::size_t w = 0; w < windows; ++w) {
        if (w > 0) {
            if (doc[w - 1] >= 0) {
                --in_window[doc[w - 1]];
            }
            if (doc[w + span - 1] >= 0) {
                ++in_window[doc[w + span - 1]];
            }
        }
        present.clear();
        for (std::size_t t = 0; t < num_words; ++t) {
            if (in_window[t] > 0) {
                present.push_back(t);
            }
        }
        ++out.total_windows;
        for (std::size_t a = 0; a < present.size(); ++a) {
            ++out.single[present[a]];
            for (std::size_t b = a + 1; b < present.size(); ++b) {
                ++out.pair[present[a] * num_words + present[b]];
                ++out.pair[present[b] * num_words + present[a]];
            }
        }
    }
}

WindowCounts empty_counts(std::size_t num_words)
{
    WindowCounts c;
    c.single.assign(num_words, 0);
    c.pair.assign(num_words * num_words, 0);
    return c;
}

void merge_into(WindowCounts& dst, const WindowCounts& src)
{
    dst.total_windows += src.total_windows;
    for (std::size_t i = 0; i < dst.single.size(); ++i) {
        dst.single[i] += src.single[i];
    }
    for (std::size_t i = 0; i < dst.pair.size(); ++i) {
        dst.pair[i] += src.pair[i];
    }
}

} // namespace

void cosine_scores(std::span<const double> query, const RowMatrix& docs, std::span<double> out)
{
    const double qn = query_norm(query);
    const std::size_t dim = static_cast<std::size_t>(docs.cols());
    const std::int64_t rows = docs.rows();
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < rows; ++i) {
        out[i] = row_cosine(query.data(), qn, docs.data() + i * docs.cols(), dim);
    }
}

void assign_nearest(const RowMatrix& points, const RowMatrix& centroids, std::span<int> labels,
                    std::span<double> sq_dist)
{
    const std::size_t dim = static_cast<std::size_t>(points.cols());
    const std::int64_t rows = points.rows();
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < rows; ++i) {
        nearest_one(points.data() + i * points.cols(), centroids, dim, labels[i], sq_dist[i]);
    }
}

WindowCounts window_counts(const std::vector<std::vector<int>>& docs, std::size_t num_words,
                           std::size_t window_size)
{
    WindowCounts total = empty_counts(num_words);
#pragma omp parallel
    {
        WindowCounts local = empty_counts(num_words);
        std::vector<int> in_window(num_words, 0);
#pragma omp for schedule(dynamic, 64) nowait
        for (std::int64_t d = 0; d < static_cast<std::int64_t>(docs.size()); ++d) {
            count_doc(docs[d], num_words, window_size, in_window, local);
        }
        // Integer counts: the merge order does not affect the result.
#pragma omp critical
        merge_into(total, local);
    }
    return total;
}

namespace serial {

void cosine_scores(std::span<const double> query, const RowMatrix& docs, std::span<double> out)
{
    const double qn = query_norm(query);
    const std::size_t dim = static_cast<std::size_t>(docs.cols());
    for (Eigen::Index i = 0; i < docs.rows(); ++i) {
        out[i] = row_cosine(query.data(), qn, docs.data() + i * docs.cols(), dim);
    }
}

void assign_nearest(const RowMatrix& points, const RowMatrix& centroids, std::span<int> labels,
                    std::span<double> sq_dist)
{
    const std::size_t dim = static_cast<std::size_t>(points.cols());
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        nearest_one(points.data() + i * points.cols(), centroids, dim, labels[i], sq_dist[i]);
    }
}

WindowCounts window_counts(const std::vector<std::vector<int>>& docs, std::size_t num_words,
                           std::size_t window_size)
{
    WindowCounts total = empty_counts(num_words);
    std::vector<int> in_window(num_words, 0);
    for (const auto& doc : docs) {
        count_doc(doc, num_words, window_size, in_window, total);
    }
    return total;
}

} // namespace serial
} // namespace privminer::kernels
