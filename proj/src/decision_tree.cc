/*
 * Copyright 2026 The prefcf Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "absl/strings/str_cat.h"
#include "prefcf/models.h"
#include "prefcf/status_macros.h"

namespace prefcf::models {
namespace {

using nlohmann::json;

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;
};

double Gini(double positives, double total) {
  if (total <= 0.0) return 0.0;
  const double p = positives / total;
  return 2.0 * p * (1.0 - p);
}

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& rows, std::span<const int> labels,
              const DecisionTreeModel::Options& options,
              std::vector<DecisionTreeModel::Node>& nodes)
      : rows_(rows), labels_(labels), options_(options), nodes_(nodes),
        rng_(options.seed) {}

  int Build(std::vector<size_t>& indices, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    double positives = 0.0;
    for (const size_t i : indices) positives += labels_[i];
    const double total = static_cast<double>(indices.size());
    nodes_[id].proba = positives / total;

    if (depth >= options_.max_depth || positives == 0.0 || positives == total) {
      return id;
    }
    const Split split = BestSplit(indices, positives);
    if (split.feature < 0 ||
        split.impurity >= Gini(positives, total) * total - 1e-12) {
      return id;
    }
    std::vector<size_t> left;
    std::vector<size_t> right;
    for (const size_t i : indices) {
      (rows_[i][split.feature] <= split.threshold ? left : right).push_back(i);
    }
    indices.clear();
    indices.shrink_to_fit();
    nodes_[id].feature = split.feature;
    nodes_[id].threshold = split.threshold;
    const int left_id = Build(left, depth + 1);
    const int right_id = Build(right, depth + 1);
    nodes_[id].left = left_id;
    nodes_[id].right = right_id;
    return id;
  }

 private:
  std::vector<int> CandidateFeatures() {
    const int num_features = static_cast<int>(rows_.front().size());
    std::vector<int> features(num_features);
    std::iota(features.begin(), features.end(), 0);
    const int wanted = options_.max_features;
    if (wanted <= 0 || wanted >= num_features) return features;
    for (int i = 0; i < wanted; ++i) {
      std::uniform_int_distribution<int> pick(i, num_features - 1);
      std::swap(features[i], features[pick(rng_)]);
    }
    features.resize(wanted);
    std::sort(features.begin(), features.end());
    return features;
  }

  // Weighted child Gini (sum of n_child * gini_child) of the best threshold.
  Split BestSplit(const std::vector<size_t>& indices, double positives) {
    Split best;
    best.impurity = std::numeric_limits<double>::infinity();
    const double total = static_cast<double>(indices.size());
    std::vector<size_t> order(indices);
    for (const int feature : CandidateFeatures()) {
      std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        const double va = rows_[a][feature];
        const double vb = rows_[b][feature];
        return va < vb || (va == vb && a < b);
      });
      double left_pos = 0.0;
      for (size_t k = 0; k + 1 < order.size(); ++k) {
        left_pos += labels_[order[k]];
        const double lo = rows_[order[k]][feature];
        const double hi = rows_[order[k + 1]][feature];
        if (lo == hi) continue;
        const double left_n = static_cast<double>(k + 1);
        const double right_n = total - left_n;
        const double impurity = left_n * Gini(left_pos, left_n) +
                                right_n * Gini(positives - left_pos, right_n);
        if (impurity < best.impurity) {
          best.impurity = impurity;
          best.feature = feature;
          best.threshold = lo + (hi - lo) / 2.0;
        }
      }
    }
    return best;
  }

  const Matrix& rows_;
  std::span<const int> labels_;
  const DecisionTreeModel::Options& options_;
  std::vector<DecisionTreeModel::Node>& nodes_;
  std::mt19937_64 rng_;
};

}  // namespace

absl::Status DecisionTreeModel::Fit(const Matrix& rows,
                                    std::span<const int> labels) {
  if (!labels.empty() && std::all_of(labels.begin(), labels.end(),
                                     [&](int label) { return label == labels.front(); })) {
    return absl::InvalidArgumentError(
        "Training labels contain a single class; both classes are required");
  }
  std::vector<size_t> sample(rows.size());
  std::iota(sample.begin(), sample.end(), 0);
  return FitSample(rows, labels, sample);
}

absl::Status DecisionTreeModel::FitSample(const Matrix& rows,
                                          std::span<const int> labels,
                                          std::span<const size_t> sample) {
  if (rows.empty() || rows.size() != labels.size() || sample.empty()) {
    return absl::InvalidArgumentError("Decision tree needs matching, non-empty rows and labels");
  }
  nodes_.clear();
  std::vector<size_t> indices(sample.begin(), sample.end());
  TreeBuilder builder(rows, labels, options_, nodes_);
  builder.Build(indices, 0);
  return absl::OkStatus();
}

double DecisionTreeModel::PredictProba(std::span<const double> row) const {
  int id = 0;
  while (nodes_[id].feature >= 0) {
    const Node& node = nodes_[id];
    id = row[node.feature] <= node.threshold ? node.left : node.right;
  }
  return nodes_[id].proba;
}

json DecisionTreeModel::ToJson() const {
  json nodes = json::array();
  for (const Node& node : nodes_) {
    nodes.push_back({node.feature, node.threshold, node.left, node.right, node.proba});
  }
  return {{"format", "prefcf-model"},
          {"version", 1},
          {"kind", "decision_tree"},
          {"hyperparameters",
           {{"max_depth", options_.max_depth},
            {"max_features", options_.max_features},
            {"seed", options_.seed}}},
          {"parameters", {{"nodes", std::move(nodes)}}}};
}

absl::StatusOr<std::unique_ptr<DecisionTreeModel>> DecisionTreeModel::FromJson(
    const json& root) {
  try {
    Options options;
    const auto& hyper = root.at("hyperparameters");
    options.max_depth = hyper.at("max_depth").get<int>();
    options.max_features = hyper.at("max_features").get<int>();
    options.seed = hyper.at("seed").get<uint64_t>();
    auto model = std::make_unique<DecisionTreeModel>(options);
    for (const auto& item : root.at("parameters").at("nodes")) {
      Node node;
      node.feature = item.at(0).get<int>();
      node.threshold = item.at(1).get<double>();
      node.left = item.at(2).get<int>();
      node.right = item.at(3).get<int>();
      node.proba = item.at(4).get<double>();
      model->nodes_.push_back(node);
    }
    const int size = static_cast<int>(model->nodes_.size());
    if (size == 0) return absl::InvalidArgumentError("Tree has no nodes");
    for (int i = 0; i < size; ++i) {
      const Node& node = model->nodes_[i];
      // Children must follow their parent.
      if (node.feature >= 0 && (node.left <= i || node.right <= i ||
                                node.left >= size || node.right >= size)) {
        return absl::InvalidArgumentError("Tree node links out of range");
      }
    }
    return model;
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("Malformed tree: ", e.what()));
  }
}

}  // namespace prefcf::models
