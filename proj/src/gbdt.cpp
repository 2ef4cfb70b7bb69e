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

#include "privminer/classify.hpp"

#include "privminer/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace privminer {

double RegressionTree::predict(const double* row) const
{
    int i = 0;
    while (nodes[i].feature >= 0) {
        i = row[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
    }
    return nodes[i].value;
}

namespace {

double sigmoid(double z)
{
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double log_loss(const std::vector<double>& margin, const std::vector<int>& y)
{
    double loss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double z = margin[i];
        const double sp = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
        loss += sp - (y[i] == 1 ? z : 0.0);
    }
    return loss / static_cast<double>(y.size());
}

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const RowMatrix& x, const std::vector<std::vector<std::uint32_t>>& sorted,
                const GbdtConfig& config)
        : x_(x), sorted_(sorted), config_(config), node_of_(static_cast<std::size_t>(x.rows()), -1)
    {
    }

    RegressionTree build(const std::vector<double>& grad, const std::vector<double>& hess)
    {
        grad_ = &grad;
        hess_ = &hess;
        RegressionTree tree;
        tree.nodes.emplace_back();
        std::fill(node_of_.begin(), node_of_.end(), 0);
        grow(tree, 0, 0);
        return tree;
    }

private:
    double leaf_value(double g, double h) const { return -g / (h + config_.lambda); }

    double score(double g, double h) const { return g * g / (h + config_.lambda); }

    // Exact greedy search: every feature, every boundary between distinct
    // consecutive values among the node's rows. Lowest feature index and
    // then lowest threshold win ties.
    Split best_split(int node, double g_total, double h_total) const
    {
        Split best;
        const double parent = score(g_total, h_total);
        const auto n_features = static_cast<std::size_t>(x_.cols());
        for (std::size_t f = 0; f < n_features; ++f) {
            double g_left = 0.0;
            double h_left = 0.0;
            bool have_prev = false;
            double prev = 0.0;
            for (std::uint32_t r : sorted_[f]) {
                if (node_of_[r] != node) {
                    continue;
                }
                const double v = x_(r, static_cast<Eigen::Index>(f));
                if (have_prev && v > prev && h_left >= config_.min_child_weight &&
                    h_total - h_left >= config_.min_child_weight) {
                    const double gain = score(g_left, h_left) + score(g_total - g_left, h_total - h_left) - parent;
                    if (gain > best.gain + 1e-12) {
                        double t = prev + (v - prev) / 2.0;
                        if (!(t >= prev && t < v)) {
                            t = prev;
                        }
                        best = {static_cast<int>(f), t, gain};
                    }
                }
                g_left += (*grad_)[r];
                h_left += (*hess_)[r];
                prev = v;
                have_prev = true;
            }
        }
        return best;
    }

    void grow(RegressionTree& tree, int node, int depth)
    {
        double g = 0.0;
        double h = 0.0;
        for (std::size_t r = 0; r < node_of_.size(); ++r) {
            if (node_of_[r] == node) {
                g += (*grad_)[r];
                h += (*hess_)[r];
            }
        }
        Split split;
        if (depth < config_.depth) {
            split = best_split(node, g, h);
        }
        if (split.feature < 0) {
            tree.nodes[node].value = leaf_value(g, h);
            return;
        }
        const int left = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        tree.nodes[node].feature = split.feature;
        tree.nodes[node].threshold = split.threshold;
        tree.nodes[node].left = left;
        tree.nodes[node].right = left + 1;
        for (std::size_t r = 0; r < node_of_.size(); ++r) {
            if (node_of_[r] == node) {
                node_of_[r] = x_(static_cast<Eigen::Index>(r), split.feature) <= split.threshold ? left : left + 1;
            }
        }
        grow(tree, left, depth + 1);
        grow(tree, left + 1, depth + 1);
    }

    const RowMatrix& x_;
    const std::vector<std::vector<std::uint32_t>>& sorted_;
    const GbdtConfig& config_;
    std::vector<int> node_of_;
    const std::vector<double>* grad_ = nullptr;
    const std::vector<double>* hess_ = nullptr;
};

} // namespace

GbdtParams fit_gbdt(const RowMatrix& x, const std::vector<int>& y, const GbdtConfig& config,
                    GbdtTrace* trace)
{
    if (static_cast<std::size_t>(x.rows()) != y.size() || y.empty()) {
        throw DataError("feature rows and labels differ in length");
    }
    const auto n = y.size();
    const auto positives = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
    if (positives == 0 || positives == n) {
        throw DataError("training data must contain both classes");
    }
    if (config.trees < 0 || config.depth < 0 || config.lr <= 0.0) {
        throw UsageError("invalid GBDT configuration");
    }

    GbdtParams params;
    params.learning_rate = config.lr;
    params.init_score = std::log(static_cast<double>(positives) / static_cast<double>(n - positives));

    // Row order per feature, sorted by value (stable on row index).
    std::vector<std::vector<std::uint32_t>> sorted(static_cast<std::size_t>(x.cols()));
    for (std::size_t f = 0; f < sorted.size(); ++f) {
        auto& order = sorted[f];
        order.resize(n);
        std::iota(order.begin(), order.end(), 0U);
        std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            return x(a, static_cast<Eigen::Index>(f)) < x(b, static_cast<Eigen::Index>(f));
        });
    }

    std::vector<double> margin(n, params.init_score);
    double loss = log_loss(margin, y);
    if (trace) {
        trace->loss.assign(1, loss);
    }
    TreeBuilder builder(x, sorted, config);
    std::vector<double> grad(n), hess(n), step(n), candidate(n);
    for (int t = 0; t < config.trees; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(margin[i]);
            grad[i] = p - (y[i] == 1 ? 1.0 : 0.0);
            hess[i] = p * (1.0 - p);
        }
        RegressionTree tree = builder.build(grad, hess);
        for (std::size_t i = 0; i < n; ++i) {
            step[i] = tree.predict(x.data() + i * x.cols());
        }
        // Shrink the step until the training loss does not increase.
        double scale = config.lr;
        double new_loss = loss;
        bool accepted = false;
        for (int attempt = 0; attempt < 40; ++attempt) {
            for (std::size_t i = 0; i < n; ++i) {
                candidate[i] = margin[i] + scale * step[i];
            }
            new_loss = log_loss(candidate, y);
            if (new_loss <= loss) {
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if (!accepted) {
            break;
        }
        for (TreeNode& node : tree.nodes) {
            node.value *= scale;
        }
        margin.swap(candidate);
        loss = new_loss;
        params.trees.push_back(std::move(tree));
        if (trace) {
            trace->loss.push_back(loss);
        }
    }
    return params;
}

} // namespace privminer
