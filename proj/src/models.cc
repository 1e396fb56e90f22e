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

#include "prefcf/models.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "absl/strings/str_cat.h"
#include "prefcf/csv.h"
#include "prefcf/status_macros.h"

namespace prefcf::models {
namespace {

using nlohmann::json;

absl::Status CheckTrainingData(const Matrix& rows, std::span<const int> labels) {
  if (rows.empty() || rows.size() != labels.size()) {
    return absl::InvalidArgumentError(
        "Training data needs matching, non-empty rows and labels");
  }
  const size_t width = rows.front().size();
  for (const auto& row : rows) {
    if (row.size() != width) {
      return absl::InvalidArgumentError("Training rows differ in length");
    }
  }
  const auto positives = std::count(labels.begin(), labels.end(), 1);
  if (positives == 0 || positives == static_cast<long>(labels.size())) {
    return absl::InvalidArgumentError(
        "Training labels contain a single class; both classes are required");
  }
  return absl::OkStatus();
}

json Header(std::string_view kind) {
  return {{"format", "prefcf-model"}, {"version", 1}, {"kind", kind}};
}

}  // namespace

std::string_view ModelKindName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kKnn:
      return "knn";
    case ModelKind::kNaiveBayes:
      return "naive_bayes";
    case ModelKind::kDecisionTree:
      return "decision_tree";
    case ModelKind::kRandomForest:
      return "random_forest";
  }
  return "unknown";
}

absl::StatusOr<ModelKind> ParseModelKind(std::string_view name) {
  for (const ModelKind kind : {ModelKind::kKnn, ModelKind::kNaiveBayes,
                               ModelKind::kDecisionTree, ModelKind::kRandomForest}) {
    if (ModelKindName(kind) == name) return kind;
  }
  return absl::InvalidArgumentError(absl::StrCat("Unknown model kind \"", std::string(name), "\""));
}

// KNN.

absl::Status KnnModel::Fit(const Matrix& rows, std::span<const int> labels) {
  RETURN_IF_ERROR(CheckTrainingData(rows, labels));
  if (k_ < 1) return absl::InvalidArgumentError("knn needs k >= 1");
  rows_ = rows;
  labels_.assign(labels.begin(), labels.end());
  return absl::OkStatus();
}

double KnnModel::PredictProba(std::span<const double> row) const {
  std::vector<std::pair<double, size_t>> distances(rows_.size());
  for (size_t i = 0; i < rows_.size(); ++i) {
    double sum = 0.0;
    for (size_t f = 0; f < row.size(); ++f) {
      const double diff = rows_[i][f] - row[f];
      sum += diff * diff;
    }
    distances[i] = {sum, i};
  }
  const size_t k = std::min(static_cast<size_t>(k_), distances.size());
  std::partial_sort(distances.begin(), distances.begin() + k, distances.end());
  int hits = 0;
  for (size_t i = 0; i < k; ++i) hits += labels_[distances[i].second];
  return static_cast<double>(hits) / static_cast<double>(k);
}

json KnnModel::ToJson() const {
  json root = Header(name());
  root["hyperparameters"] = {{"k", k_}};
  root["parameters"] = {{"rows", rows_}, {"labels", labels_}};
  return root;
}

absl::StatusOr<std::unique_ptr<KnnModel>> KnnModel::FromJson(const json& root) {
  try {
    auto model = std::make_unique<KnnModel>(root.at("hyperparameters").at("k").get<int>());
    const auto& params = root.at("parameters");
    model->rows_ = params.at("rows").get<Matrix>();
    model->labels_ = params.at("labels").get<std::vector<int>>();
    RETURN_IF_ERROR(CheckTrainingData(model->rows_, model->labels_));
    return model;
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("Malformed knn model: ", e.what()));
  }
}

// Naive Bayes.

absl::Status NaiveBayesModel::Fit(const Matrix& rows, std::span<const int> labels) {
  RETURN_IF_ERROR(CheckTrainingData(rows, labels));
  const size_t width = rows.front().size();
  double largest_variance = 0.0;
  for (size_t f = 0; f < width; ++f) {
    double mean = 0.0;
    for (const auto& row : rows) mean += row[f];
    mean /= static_cast<double>(rows.size());
    double variance = 0.0;
    for (const auto& row : rows) variance += (row[f] - mean) * (row[f] - mean);
    largest_variance = std::max(largest_variance, variance / static_cast<double>(rows.size()));
  }
  const double epsilon = std::max(1e-9 * largest_variance, 1e-12);
  for (int c = 0; c < 2; ++c) {
    std::vector<size_t> members;
    for (size_t i = 0; i < rows.size(); ++i) {
      if (labels[i] == c) members.push_back(i);
    }
    const double n = static_cast<double>(members.size());
    log_prior_[c] = std::log(n / static_cast<double>(rows.size()));
    mean_[c].assign(width, 0.0);
    variance_[c].assign(width, 0.0);
    for (const size_t i : members) {
      for (size_t f = 0; f < width; ++f) mean_[c][f] += rows[i][f];
    }
    for (size_t f = 0; f < width; ++f) mean_[c][f] /= n;
    for (const size_t i : members) {
      for (size_t f = 0; f < width; ++f) {
        const double diff = rows[i][f] - mean_[c][f];
        variance_[c][f] += diff * diff;
      }
    }
    for (size_t f = 0; f < width; ++f) variance_[c][f] = variance_[c][f] / n + epsilon;
  }
  return absl::OkStatus();
}

double NaiveBayesModel::PredictProba(std::span<const double> row) const {
  double log_likelihood[2];
  for (int c = 0; c < 2; ++c) {
    double total = log_prior_[c];
    for (size_t f = 0; f < row.size(); ++f) {
      const double diff = row[f] - mean_[c][f];
      total -= 0.5 * std::log(2.0 * std::numbers::pi * variance_[c][f]) +
               diff * diff / (2.0 * variance_[c][f]);
    }
    log_likelihood[c] = total;
  }
  return 1.0 / (1.0 + std::exp(log_likelihood[0] - log_likelihood[1]));
}

json NaiveBayesModel::ToJson() const {
  json root = Header(name());
  root["hyperparameters"] = json::object();
  root["parameters"] = {{"log_prior", {log_prior_[0], log_prior_[1]}},
                        {"mean", {mean_[0], mean_[1]}},
                        {"variance", {variance_[0], variance_[1]}}};
  return root;
}

absl::StatusOr<std::unique_ptr<NaiveBayesModel>> NaiveBayesModel::FromJson(
    const json& root) {
  try {
    auto model = std::make_unique<NaiveBayesModel>();
    const auto& params = root.at("parameters");
    for (int c = 0; c < 2; ++c) {
      model->log_prior_[c] = params.at("log_prior").at(c).get<double>();
      model->mean_[c] = params.at("mean").at(c).get<std::vector<double>>();
      model->variance_[c] = params.at("variance").at(c).get<std::vector<double>>();
    }
    if (model->mean_[0].size() != model->mean_[1].size() ||
        model->variance_[0].size() != model->mean_[0].size() ||
        model->variance_[1].size() != model->mean_[0].size()) {
      return absl::InvalidArgumentError("Naive Bayes parameter sizes differ");
    }
    return model;
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("Malformed naive Bayes model: ", e.what()));
  }
}

// Random forest.

absl::Status RandomForestModel::Fit(const Matrix& rows, std::span<const int> labels) {
  RETURN_IF_ERROR(CheckTrainingData(rows, labels));
  if (options_.num_trees < 1) return absl::InvalidArgumentError("Forest needs trees");
  const size_t n = rows.size();
  const int width = static_cast<int>(rows.front().size());
  std::mt19937_64 rng(options_.seed);
  std::uniform_int_distribution<size_t> draw(0, n - 1);
  trees_.clear();
  trees_.reserve(options_.num_trees);
  std::vector<size_t> sample(n);
  for (int t = 0; t < options_.num_trees; ++t) {
    DecisionTreeModel::Options tree_options;
    tree_options.max_depth = options_.max_depth;
    tree_options.max_features =
        std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(width)))));
    tree_options.seed = rng();
    for (size_t i = 0; i < n; ++i) sample[i] = draw(rng);
    DecisionTreeModel tree(tree_options);
    RETURN_IF_ERROR(tree.FitSample(rows, labels, sample));
    trees_.push_back(std::move(tree));
  }
  return absl::OkStatus();
}

double RandomForestModel::PredictProba(std::span<const double> row) const {
  double sum = 0.0;
  for (const auto& tree : trees_) sum += tree.PredictProba(row);
  return sum / static_cast<double>(trees_.size());
}

json RandomForestModel::ToJson() const {
  json root = Header(name());
  root["hyperparameters"] = {{"num_trees", options_.num_trees},
                             {"max_depth", options_.max_depth},
                             {"seed", options_.seed}};
  json trees = json::array();
  for (const auto& tree : trees_) trees.push_back(tree.ToJson());
  root["parameters"] = {{"trees", std::move(trees)}};
  return root;
}

absl::StatusOr<std::unique_ptr<RandomForestModel>> RandomForestModel::FromJson(
    const json& root) {
  try {
    Options options;
    const auto& hyper = root.at("hyperparameters");
    options.num_trees = hyper.at("num_trees").get<int>();
    options.max_depth = hyper.at("max_depth").get<int>();
    options.seed = hyper.at("seed").get<uint64_t>();
    auto model = std::make_unique<RandomForestModel>(options);
    for (const auto& item : root.at("parameters").at("trees")) {
      ASSIGN_OR_RETURN(auto tree, DecisionTreeModel::FromJson(item));
      model->trees_.push_back(std::move(*tree));
    }
    if (model->trees_.empty()) return absl::InvalidArgumentError("Forest has no trees");
    return model;
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("Malformed random forest: ", e.what()));
  }
}

// Factories and persistence.

std::unique_ptr<ClassifierModel> MakeModel(ModelKind kind, uint64_t seed) {
  switch (kind) {
    case ModelKind::kKnn:
      return std::make_unique<KnnModel>(5);
    case ModelKind::kNaiveBayes:
      return std::make_unique<NaiveBayesModel>();
    case ModelKind::kDecisionTree:
      return std::make_unique<DecisionTreeModel>(
          DecisionTreeModel::Options{.max_depth = 8, .max_features = 0, .seed = seed});
    case ModelKind::kRandomForest:
      return std::make_unique<RandomForestModel>(
          RandomForestModel::Options{.num_trees = 50, .max_depth = 10, .seed = seed});
  }
  return nullptr;
}

absl::StatusOr<std::unique_ptr<ClassifierModel>> FitBuiltin(
    ModelKind kind, const tabular::EncodedData& data, uint64_t seed) {
  if (data.num_rows() < 10) {
    return absl::InvalidArgumentError(absl::StrCat(
        "Fitting ", std::string(ModelKindName(kind)), " needs at least 10 rows, got ", data.num_rows()));
  }
  auto model = MakeModel(kind, seed);
  RETURN_IF_ERROR(model->Fit(data.rows, data.labels));
  return model;
}

absl::StatusOr<std::unique_ptr<ClassifierModel>> ModelFromJson(const json& root) {
  std::string kind_name;
  try {
    if (root.at("format").get<std::string>() != "prefcf-model") {
      return absl::InvalidArgumentError("Not a prefcf model file");
    }
    if (root.at("version").get<int>() != 1) {
      return absl::InvalidArgumentError("Unsupported model file version");
    }
    kind_name = root.at("kind").get<std::string>();
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("Malformed model file: ", e.what()));
  }
  ASSIGN_OR_RETURN(const ModelKind kind, ParseModelKind(kind_name));
  switch (kind) {
    case ModelKind::kKnn:
      return KnnModel::FromJson(root);
    case ModelKind::kNaiveBayes:
      return NaiveBayesModel::FromJson(root);
    case ModelKind::kDecisionTree:
      return DecisionTreeModel::FromJson(root);
    case ModelKind::kRandomForest:
      return RandomForestModel::FromJson(root);
  }
  return absl::InternalError("Unreachable model kind");
}

absl::Status SaveModel(const ClassifierModel& model, const std::string& path) {
  return csv::WriteFile(path, model.ToJson().dump());
}

absl::StatusOr<std::unique_ptr<ClassifierModel>> LoadModel(const std::string& path) {
  ASSIGN_OR_RETURN(const std::string text, csv::ReadFile(path));
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("Model file ", path, " is not valid JSON: ", e.what()));
  }
  return ModelFromJson(root);
}

// Scores.

double F1Score(double precision, double recall) {
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double F1FromPredictions(std::span<const int> truth, std::span<const int> predictions) {
  double true_pos = 0.0;
  double predicted_pos = 0.0;
  double actual_pos = 0.0;
  for (size_t i = 0; i < truth.size(); ++i) {
    true_pos += (truth[i] == 1 && predictions[i] == 1) ? 1.0 : 0.0;
    predicted_pos += predictions[i] == 1 ? 1.0 : 0.0;
    actual_pos += truth[i] == 1 ? 1.0 : 0.0;
  }
  const double precision = predicted_pos > 0.0 ? true_pos / predicted_pos : 0.0;
  const double recall = actual_pos > 0.0 ? true_pos / actual_pos : 0.0;
  return F1Score(precision, recall);
}

absl::StatusOr<ThirdPartyJury> CvWeights(std::span<const NamedFactory> members,
                                         const tabular::EncodedData& data,
                                         int folds, uint64_t seed) {
  if (members.size() < 2) {
    return absl::InvalidArgumentError("A jury needs at least two members");
  }
  if (folds < 2) return absl::InvalidArgumentError("Cross-validation needs folds >= 2");
  if (data.num_rows() < static_cast<size_t>(folds)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "Cross-validation with ", folds, " folds needs at least ", folds,
        " rows, got ", data.num_rows()));
  }
  std::vector<size_t> order(data.num_rows());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> fold_of(data.num_rows());
  for (size_t position = 0; position < order.size(); ++position) {
    fold_of[order[position]] = static_cast<int>(position % folds);
  }

  ThirdPartyJury jury;
  jury.protocol = absl::StrCat(folds, "-fold cross-validated F1, seed ", seed);
  for (const NamedFactory& member : members) {
    double f1_sum = 0.0;
    for (int fold = 0; fold < folds; ++fold) {
      Matrix train_rows;
      std::vector<int> train_labels;
      std::vector<size_t> held_out;
      for (size_t r = 0; r < data.num_rows(); ++r) {
        if (fold_of[r] == fold) {
          held_out.push_back(r);
        } else {
          train_rows.push_back(data.rows[r]);
          train_labels.push_back(data.labels[r]);
        }
      }
      auto model = member.factory(seed + static_cast<uint64_t>(fold) + 1);
      if (absl::Status status = model->Fit(train_rows, train_labels); !status.ok()) {
        return absl::InvalidArgumentError(absl::StrCat(
            member.name, " failed on fold ", fold, ": ", status.message()));
      }
      std::vector<int> truth;
      std::vector<int> predictions;
      for (const size_t r : held_out) {
        truth.push_back(data.labels[r]);
        predictions.push_back(model->Predict(data.rows[r]));
      }
      f1_sum += F1FromPredictions(truth, predictions);
    }
    auto model = member.factory(seed);
    RETURN_IF_ERROR(model->Fit(data.rows, data.labels));
    jury.members.push_back(JuryMember{member.name, std::move(model),
                                      f1_sum / static_cast<double>(folds)});
  }
  return jury;
}

absl::StatusOr<ThirdPartyJury> CvWeights(std::span<const ModelKind> kinds,
                                         const tabular::EncodedData& data,
                                         int folds, uint64_t seed) {
  std::vector<NamedFactory> factories;
  for (const ModelKind kind : kinds) {
    factories.push_back(NamedFactory{
        std::string(ModelKindName(kind)),
        [kind](uint64_t member_seed) { return MakeModel(kind, member_seed); }});
  }
  return CvWeights(factories, data, folds, seed);
}

}  // namespace prefcf::models
