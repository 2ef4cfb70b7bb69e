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

#include "privminer/error.hpp"
#include "privminer/pctd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace privminer {

namespace {

double sq_distance(const RowMatrix& a, Eigen::Index i, const RowMatrix& b, Eigen::Index j)
{
    double d = 0.0;
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
        const double diff = a(i, c) - b(j, c);
        d += diff * diff;
    }
    return d;
}

double total_inertia(const std::vector<double>& sq_dist)
{
    double s = 0.0;
    for (double d : sq_dist) {
        s += d;
    }
    return s;
}

void recompute_distances(const RowMatrix& points, const RowMatrix& centroids,
                         const std::vector<int>& labels, std::vector<double>& sq_dist)
{
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        sq_dist[i] = sq_distance(points, i, centroids, labels[i]);
    }
}

} // namespace

std::size_t count_distinct_rows(const RowMatrix& points)
{
    std::set<std::vector<double>> rows;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        rows.emplace(points.row(i).begin(), points.row(i).end());
    }
    return rows.size();
}

std::vector<std::size_t> kmeans_pp_seed(const RowMatrix& points, std::size_t k, Rng& rng)
{
    if (points.rows() == 0) {
        throw DataError("cannot seed K-means on an empty point set");
    }
    const std::size_t first = rng.below(static_cast<std::uint64_t>(points.rows()));
    return kmeans_pp_seed(points, k, first, rng);
}

std::vector<std::size_t> kmeans_pp_seed(const RowMatrix& points, std::size_t k, std::size_t first,
                                        Rng& rng)
{
    if (k < 1) {
        throw UsageError("K must be at least 1");
    }
    const std::size_t distinct = count_distinct_rows(points);
    if (k > distinct) {
        throw DataError("K=" + std::to_string(k) + " exceeds the number of distinct points (" +
                        std::to_string(distinct) + ")");
    }
    const auto n = static_cast<std::size_t>(points.rows());
    std::vector<std::size_t> chosen{first};
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) {
        d2[i] = sq_distance(points, static_cast<Eigen::Index>(i), points, static_cast<Eigen::Index>(first));
    }
    while (chosen.size() < k) {
        double total = 0.0;
        for (double d : d2) {
            total += d;
        }
        const double u = rng.uniform() * total;
        double acc = 0.0;
        std::size_t pick = n;
        std::size_t last_positive = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (d2[i] <= 0.0) {
                continue;
            }
            last_positive = i;
            acc += d2[i];
            if (acc > u) {
                pick = i;
                break;
            }
        }
        if (pick == n) {
            pick = last_positive;   // u rounded up to the total
        }
        chosen.push_back(pick);
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], sq_distance(points, static_cast<Eigen::Index>(i), points,
                                                static_cast<Eigen::Index>(pick)));
        }
    }
    return chosen;
}

ClusterAssignment kmeans_from_seeds(const RowMatrix& points, const RowMatrix& seeds,
                                    const KMeansConfig& config)
{
    if (config.max_iters < 1) {
        throw UsageError("max_iters must be at least 1");
    }
    const auto n = static_cast<std::size_t>(points.rows());
    const auto k = static_cast<std::size_t>(seeds.rows());
    ClusterAssignment out;
    out.k = k;
    out.centroids = seeds;
    out.labels.assign(n, 0);
    std::vector<double> sq_dist(n, 0.0);

    for (int iter = 0; iter < config.max_iters; ++iter) {
        out.iterations_run = iter + 1;
        kernels::assign_nearest(points, out.centroids, out.labels, sq_dist);
        out.inertia_history.push_back(total_inertia(sq_dist));

        // Repair: an empty cluster takes the point farthest from its own
        // centroid, among points whose cluster has more than one member.
        std::vector<std::size_t> sizes(k, 0);
        for (int l : out.labels) {
            ++sizes[static_cast<std::size_t>(l)];
        }
        bool repaired = false;
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] != 0) {
                continue;
            }
            std::size_t far = n;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (sizes[static_cast<std::size_t>(out.labels[i])] > 1 && sq_dist[i] > far_d) {
                    far_d = sq_dist[i];
                    far = i;
                }
            }
            if (far == n) {
                throw DataError("cannot repair empty cluster");
            }
            --sizes[static_cast<std::size_t>(out.labels[far])];
            out.labels[far] = static_cast<int>(c);
            ++sizes[c];
            out.centroids.row(static_cast<Eigen::Index>(c)) = points.row(static_cast<Eigen::Index>(far));
            sq_dist[far] = 0.0;
            repaired = true;
        }
        if (repaired) {
            out.inertia_history.push_back(total_inertia(sq_dist));
        }

        // Update: member means, summed in row order.
        RowMatrix next = RowMatrix::Zero(static_cast<Eigen::Index>(k), points.cols());
        for (std::size_t i = 0; i < n; ++i) {
            next.row(out.labels[i]) += points.row(static_cast<Eigen::Index>(i));
        }
        double max_shift = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            const auto r = static_cast<Eigen::Index>(c);
            next.row(r) /= static_cast<double>(sizes[c]);
            max_shift = std::max(max_shift, std::sqrt(sq_distance(next, r, out.centroids, r)));
        }
        out.centroids = std::move(next);
        recompute_distances(points, out.centroids, out.labels, sq_dist);
        out.inertia_history.push_back(total_inertia(sq_dist));
        if (max_shift < config.tol) {
            break;
        }
    }
    out.inertia = out.inertia_history.empty() ? 0.0 : out.inertia_history.back();
    return out;
}

ClusterAssignment kmeans_cluster(const RowMatrix& points, std::size_t k, std::uint64_t seed,
                                 const KMeansConfig& config)
{
    Rng rng(seed);
    const std::vector<std::size_t> picks = kmeans_pp_seed(points, k, rng);
    RowMatrix seeds(static_cast<Eigen::Index>(k), points.cols());
    for (std::size_t c = 0; c < k; ++c) {
        seeds.row(static_cast<Eigen::Index>(c)) = points.row(static_cast<Eigen::Index>(picks[c]));
    }
    return kmeans_from_seeds(points, seeds, config);
}

} // namespace privminer
