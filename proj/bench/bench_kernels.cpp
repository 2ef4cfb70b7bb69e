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

// Serial reference vs OpenMP kernels. Run with OMP_NUM_THREADS to vary the
// thread count.

#include "privminer/kernels.hpp"
#include "privminer/random.hpp"

#include <benchmark/benchmark.h>

using privminer::RowMatrix;
namespace kernels = privminer::kernels;

namespace {

RowMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed)
{
    privminer::Rng rng(seed);
    RowMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        m.data()[i] = rng.uniform() * 2.0 - 1.0;
    }
    return m;
}

std::vector<std::vector<int>> random_docs(std::size_t n, std::size_t len, int words, std::uint64_t seed)
{
    privminer::Rng rng(seed);
    std::vector<std::vector<int>> docs(n, std::vector<int>(len));
    for (auto& d : docs) {
        for (int& t : d) {
            const auto r = static_cast<int>(rng.below(static_cast<std::uint64_t>(words) * 4));
            t = r < words ? r : -1;
        }
    }
    return docs;
}

template <bool Parallel>
void BM_cosine(benchmark::State& state)
{
    const RowMatrix docs = random_matrix(state.range(0), 384, 1);
    const RowMatrix q = random_matrix(1, 384, 2);
    std::vector<double> out(static_cast<std::size_t>(docs.rows()));
    for (auto _ : state) {
        if constexpr (Parallel) {
            kernels::cosine_scores({q.data(), 384}, docs, out);
        } else {
            kernels::serial::cosine_scores({q.data(), 384}, docs, out);
        }
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_assign(benchmark::State& state)
{
    const RowMatrix points = random_matrix(state.range(0), 5, 3);
    const RowMatrix centroids = random_matrix(10, 5, 4);
    std::vector<int> labels(static_cast<std::size_t>(points.rows()));
    std::vector<double> dist(labels.size());
    for (auto _ : state) {
        if constexpr (Parallel) {
            kernels::assign_nearest(points, centroids, labels, dist);
        } else {
            kernels::serial::assign_nearest(points, centroids, labels, dist);
        }
        benchmark::DoNotOptimize(labels.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_windows(benchmark::State& state)
{
    const auto docs = random_docs(static_cast<std::size_t>(state.range(0)), 200, 10, 5);
    for (auto _ : state) {
        auto counts = Parallel ? kernels::window_counts(docs, 10, 110)
                               : kernels::serial::window_counts(docs, 10, 110);
        benchmark::DoNotOptimize(counts.total_windows);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

} // namespace

BENCHMARK(BM_cosine<false>)->Arg(10000)->Arg(100000);
BENCHMARK(BM_cosine<true>)->Arg(10000)->Arg(100000);
BENCHMARK(BM_assign<false>)->Arg(10000)->Arg(100000);
BENCHMARK(BM_assign<true>)->Arg(10000)->Arg(100000);
BENCHMARK(BM_windows<false>)->Arg(200)->Arg(2000);
BENCHMARK(BM_windows<true>)->Arg(200)->Arg(2000);

BENCHMARK_MAIN();
