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

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numeric>

namespace privminer {

RowMatrix Pca::transform(const RowMatrix& x) const
{
    RowMatrix centered = x.rowwise() - mean.transpose();
    return centered * components;
}

Pca fit_pca(const RowMatrix& x, std::size_t k)
{
    const auto n = x.rows();
    const auto d = static_cast<std::size_t>(x.cols());
    if (k > d) {
        throw DataError("target dimension " + std::to_string(k) + " exceeds input dimension " +
                        std::to_string(d));
    }
    if (n == 0) {
        throw DataError("PCA of an empty point set");
    }
    Pca pca;
    pca.mean = x.colwise().mean().transpose();
    const RowMatrix centered = x.rowwise() - pca.mean.transpose();
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw DataError("eigendecomposition failed");
    }
    // Eigen returns ascending eigenvalues.
    std::vector<Eigen::Index> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return solver.eigenvalues()(a) > solver.eigenvalues()(b);
    });
    pca.components.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k));
    pca.variances.resize(static_cast<Eigen::Index>(k));
    for (std::size_t c = 0; c < k; ++c) {
        Eigen::VectorXd v = solver.eigenvectors().col(order[c]);
        Eigen::Index arg = 0;
        for (Eigen::Index i = 1; i < v.size(); ++i) {
            if (std::abs(v(i)) > std::abs(v(arg))) {
                arg = i;
            }
        }
        if (v(arg) < 0.0) {
            v = -v;
        }
        pca.components.col(static_cast<Eigen::Index>(c)) = v;
        pca.variances(static_cast<Eigen::Index>(c)) = std::max(0.0, solver.eigenvalues()(order[c]));
    }
    return pca;
}

const char* to_string(ReductionMethod m) { return m == ReductionMethod::none ? "none" : "pca"; }

ReductionMethod parse_reduction(std::string_view s)
{
    if (s == "none") {
        return ReductionMethod::none;
    }
    if (s == "pca") {
        return ReductionMethod::pca;
    }
    throw UsageError("unknown reduction method '" + std::string(s) + "' (expected none or pca)");
}

namespace {

RowMatrix to_matrix(const EmbeddingSet& set)
{
    RowMatrix m(static_cast<Eigen::Index>(set.size()), static_cast<Eigen::Index>(set.dim()));
    std::size_t i = 0;
    for (const EmbeddingVector& v : set) {
        std::copy(v.values.begin(), v.values.end(), m.data() + i * set.dim());
        ++i;
    }
    return m;
}

} // namespace

EmbeddingSet reduce_dim(const EmbeddingSet& vectors, ReductionMethod method, std::size_t target_dim,
                        std::uint64_t /*seed*/)
{
    if (target_dim > vectors.dim()) {
        throw DataError("target dimension " + std::to_string(target_dim) + " exceeds input dimension " +
                        std::to_string(vectors.dim()));
    }
    if (method == ReductionMethod::none) {
        if (target_dim != vectors.dim()) {
            throw UsageError("reduction 'none' requires target_dim equal to the input dimension");
        }
        return vectors;
    }
    if (target_dim == 0) {
        throw UsageError("target dimension must be positive");
    }
    const RowMatrix x = to_matrix(vectors);
    const RowMatrix y = fit_pca(x, target_dim).transform(x);
    EmbeddingSet out(target_dim, vectors.model_name() + "+pca" + std::to_string(target_dim));
    std::size_t i = 0;
    for (const EmbeddingVector& v : vectors) {
        EmbeddingVector r{v.doc_id, std::vector<double>(y.row(static_cast<Eigen::Index>(i)).begin(),
                                                        y.row(static_cast<Eigen::Index>(i)).end()),
                          false};
        out.insert(std::move(r));
        ++i;
    }
    return out;
}

Projection2D project_2d(const EmbeddingSet& points, std::uint64_t /*seed*/)
{
    if (points.size() < 2) {
        throw DataError("2-D projection needs at least 2 points");
    }
    const RowMatrix x = to_matrix(points);
    const std::size_t k = std::min<std::size_t>(2, points.dim());
    const RowMatrix y = fit_pca(x, k).transform(x);
    Projection2D out;
    std::size_t i = 0;
    for (const EmbeddingVector& v : points) {
        const auto r = static_cast<Eigen::Index>(i++);
        out[v.doc_id] = {y(r, 0), k > 1 ? y(r, 1) : 0.0};
    }
    return out;
}

} // namespace privminer
