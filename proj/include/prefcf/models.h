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

#ifndef PREFCF_MODELS_H_
#define PREFCF_MODELS_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "prefcf/tabular.h"

namespace prefcf::models {

using Matrix = std::vector<std::vector<double>>;

enum class ModelKind { kKnn, kNaiveBayes, kDecisionTree, kRandomForest };

std::string_view ModelKindName(ModelKind kind);
absl::StatusOr<ModelKind> ParseModelKind(std::string_view name);

// Binary classifier over encoded vectors. Label 1 is the target class.
//
// Predict(v) == 1 iff PredictProba(v) >= 0.5. Models are immutable after Fit
// and safe for concurrent prediction.
class ClassifierModel {
 public:
  virtual ~ClassifierModel() = default;

  virtual absl::Status Fit(const Matrix& rows, std::span<const int> labels) = 0;

  // Probability of the target class, in [0, 1].
  virtual double PredictProba(std::span<const double> row) const = 0;

  int Predict(std::span<const double> row) const {
    return PredictProba(row) >= 0.5 ? 1 : 0;
  }

  virtual std::string_view name() const = 0;

  // Versioned persistence payload: kind, hyperparameters and learned state.
  virtual nlohmann::json ToJson() const = 0;
};

class KnnModel : public ClassifierModel {
 public:
  explicit KnnModel(int k = 5) : k_(k) {}
  absl::Status Fit(const Matrix& rows, std::span<const int> labels) override;
  double PredictProba(std::span<const double> row) const override;
  std::string_view name() const override { return "knn"; }
  nlohmann::json ToJson() const override;
  static absl::StatusOr<std::unique_ptr<KnnModel>> FromJson(const nlohmann::json& json);

 private:
  int k_;
  Matrix rows_;
  std::vector<int> labels_;
};

// Gaussian naive Bayes, one normal per (class, feature).
class NaiveBayesModel : public ClassifierModel {
 public:
  absl::Status Fit(const Matrix& rows, std::span<const int> labels) override;
  double PredictProba(std::span<const double> row) const override;
  std::string_view name() const override { return "naive_bayes"; }
  nlohmann::json ToJson() const override;
  static absl::StatusOr<std::unique_ptr<NaiveBayesModel>> FromJson(
      const nlohmann::json& json);

 private:
  double log_prior_[2] = {0.0, 0.0};
  std::vector<double> mean_[2];
  std::vector<double> variance_[2];
};

// CART tree with Gini impurity. Leaves hold the target-class proportion.
class DecisionTreeModel : public ClassifierModel {
 public:
  struct Options {
    int max_depth = 8;
    // Features examined per split; 0 means all.
    int max_features = 0;
    uint64_t seed = 0;
  };

  struct Node {
    int feature = -1;  // -1 for leaves.
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double proba = 0.0;
  };

  DecisionTreeModel() = default;
  explicit DecisionTreeModel(Options options) : options_(options) {}

  absl::Status Fit(const Matrix& rows, std::span<const int> labels) override;
  // Fits on the rows selected by `sample`, which may contain repeats.
  absl::Status FitSample(const Matrix& rows, std::span<const int> labels,
                         std::span<const size_t> sample);
  double PredictProba(std::span<const double> row) const override;
  std::string_view name() const override { return "decision_tree"; }
  nlohmann::json ToJson() const override;
  static absl::StatusOr<std::unique_ptr<DecisionTreeModel>> FromJson(
      const nlohmann::json& json);

  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  Options options_;
  std::vector<Node> nodes_;
};

// Bagged CART trees with per-split feature subsampling.
class RandomForestModel : public ClassifierModel {
 public:
  struct Options {
    int num_trees = 50;
    int max_depth = 10;
    uint64_t seed = 0;
  };

  RandomForestModel() = default;
  explicit RandomForestModel(Options options) : options_(options) {}

  absl::Status Fit(const Matrix& rows, std::span<const int> labels) override;
  double PredictProba(std::span<const double> row) const override;
  std::string_view name() const override { return "random_forest"; }
  nlohmann::json ToJson() const override;
  static absl::StatusOr<std::unique_ptr<RandomForestModel>> FromJson(
      const nlohmann::json& json);

 private:
  Options options_;
  std::vector<DecisionTreeModel> trees_;
};

// Fits one of the built-in classifiers with its default hyperparameters:
// knn k=5, decision_tree max depth 8, random_forest bootstrapped with `seed`,
// naive_bayes Gaussian. Requires at least 10 rows and both classes.
absl::StatusOr<std::unique_ptr<ClassifierModel>> FitBuiltin(
    ModelKind kind, const tabular::EncodedData& data, uint64_t seed);

absl::StatusOr<std::unique_ptr<ClassifierModel>> ModelFromJson(
    const nlohmann::json& json);
absl::Status SaveModel(const ClassifierModel& model, const std::string& path);
absl::StatusOr<std::unique_ptr<ClassifierModel>> LoadModel(const std::string& path);

// 2PR / (P + R) on the [0, 1] scale; 0 when both inputs are 0.
double F1Score(double precision, double recall);

// F1 of `predictions` against `truth`, with label 1 as the positive class.
// Precision is 0 when nothing is predicted positive.
double F1FromPredictions(std::span<const int> truth, std::span<const int> predictions);

struct JuryMember {
  std::string name;
  std::shared_ptr<const ClassifierModel> model;
  double weight = 0.0;
};

// Independent classifiers used to measure data fidelity. Weights come from
// cross-validated F1, never from the caller.
struct ThirdPartyJury {
  std::vector<JuryMember> members;
  std::string protocol;
};

using ModelFactory =
    std::function<std::unique_ptr<ClassifierModel>(uint64_t seed)>;

struct NamedFactory {
  std::string name;
  ModelFactory factory;
};

// Weights each member by its mean held-out F1 over `folds` folds, then refits
// every member on the full data. Folds are assigned round-robin after a
// seeded shuffle.
absl::StatusOr<ThirdPartyJury> CvWeights(std::span<const NamedFactory> members,
                                         const tabular::EncodedData& data,
                                         int folds, uint64_t seed);
absl::StatusOr<ThirdPartyJury> CvWeights(std::span<const ModelKind> kinds,
                                         const tabular::EncodedData& data,
                                         int folds, uint64_t seed);

// Unfitted model of the given kind with default hyperparameters.
std::unique_ptr<ClassifierModel> MakeModel(ModelKind kind, uint64_t seed);

}  // namespace prefcf::models

#endif  // PREFCF_MODELS_H_
