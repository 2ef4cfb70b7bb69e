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

#include <cmath>

namespace privminer {

namespace {

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z)
{
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

} // namespace

double logistic_objective(const RowMatrix& x, const std::vector<int>& y, const LogregParams& p,
                          double l2, std::vector<double>* gradient)
{
    const auto n = static_cast<std::size_t>(x.rows());
    const auto d = static_cast<std::size_t>(x.cols());
    if (gradient) {
        gradient->assign(d + 1, 0.0);
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = x.data() + i * d;
        double z = p.bias;
        for (std::size_t j = 0; j < d; ++j) {
            z += p.weights[j] * row[j];
        }
        loss += softplus(z) - (y[i] == 1 ? z : 0.0);
        if (gradient) {
            const double r = sigmoid(z) - (y[i] == 1 ? 1.0 : 0.0);
            for (std::size_t j = 0; j < d; ++j) {
                (*gradient)[j] += r * row[j];
            }
            (*gradient)[d] += r;
        }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    double reg = 0.0;
    for (double w : p.weights) {
        reg += w * w;
    }
    if (gradient) {
        for (std::size_t j = 0; j < d; ++j) {
            (*gradient)[j] = (*gradient)[j] * inv_n + l2 * p.weights[j];
        }
        (*gradient)[d] *= inv_n;
    }
    return loss * inv_n + 0.5 * l2 * reg;
}

LogregParams fit_logreg(const RowMatrix& x, const std::vector<int>& y, const LogregConfig& config,
                        LogregTrace* trace)
{
    if (static_cast<std::size_t>(x.rows()) != y.size() || y.empty()) {
        throw DataError("feature rows and labels differ in length");
    }
    const bool has_pos = std::find(y.begin(), y.end(), 1) != y.end();
    const bool has_neg = std::find(y.begin(), y.end(), 0) != y.end();
    if (!has_pos || !has_neg) {
        throw DataError("training data must contain both classes");
    }
    const auto d = static_cast<std::size_t>(x.cols());
    LogregParams p{std::vector<double>(d, 0.0), 0.0};
    std::vector<double> grad;
    double loss = logistic_objective(x, y, p, config.l2, &grad);
    if (trace) {
        trace->loss.assign(1, loss);
    }
    double step = config.lr;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        // Backtracking: halve the step until the objective does not increase.
        LogregParams candidate;
        double candidate_loss = loss;
        bool accepted = false;
        for (int attempt = 0; attempt < 60; ++attempt) {
            candidate = p;
            for (std::size_t j = 0; j < d; ++j) {
                candidate.weights[j] -= step * grad[j];
            }
            candidate.bias -= step * grad[d];
            candidate_loss = logistic_objective(x, y, candidate, config.l2);
            if (candidate_loss <= loss) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            break;
        }
        p = std::move(candidate);
        loss = logistic_objective(x, y, p, config.l2, &grad);
        if (trace) {
            trace->loss.push_back(loss);
        }
    }
    return p;
}

} // namespace privminer
