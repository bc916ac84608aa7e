#pragma once

// Relative-attribute evaluation: gamma-thresholded ground-truth orders,
// pairwise ranking accuracy, and a cross-validated linear classifier.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "texelatt/rng.hpp"

namespace texelatt {

struct AttributeColumn {
  std::string attribute_name;
  std::vector<std::string> ids;
  std::vector<double> values;  // parallel to ids
  double gamma = 0.0;
};

/// gamma = fraction x (max - min) of the values.
inline double gamma_from_range(const std::vector<double>& values, double fraction = 0.05) {
  if (values.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return fraction * (*hi - *lo);
}

struct OrderedPairs {
  std::vector<std::pair<std::string, std::string>> ordered;    // first ranks above second
  std::vector<std::pair<std::string, std::string>> unordered;  // indistinguishable within gamma
  double gamma = 0.0;
};

inline OrderedPairs ground_truth_order(const AttributeColumn& column) {
  if (column.ids.size() != column.values.size()) throw std::invalid_argument("ground_truth_order: ids/values size mismatch");
  if (column.ids.size() < 2) throw std::invalid_argument("ground_truth_order: need at least 2 images");
  if (!(column.gamma >= 0.0)) throw std::invalid_argument("ground_truth_order: gamma must be >= 0");
  OrderedPairs out;
  out.gamma = column.gamma;
  const std::size_t n = column.ids.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double vi = column.values[i], vj = column.values[j];
      if (std::fabs(vi - vj) > column.gamma)
        out.ordered.push_back(vi > vj ? std::pair{column.ids[i], column.ids[j]} : std::pair{column.ids[j], column.ids[i]});
      else
        out.unordered.push_back({column.ids[i], column.ids[j]});
    }
  return out;
}

struct RankingAccuracy {
  double combined = 0.0;      // ordered and unordered pairs
  double ordered_only = 0.0;  // ordered pairs only
  std::size_t ordered_pairs = 0;
  std::size_t unordered_pairs = 0;
};

/// Ordered pairs count as correct when the prediction strictly agrees,
/// unordered pairs when the predictions differ by at most gamma.
inline RankingAccuracy ranking_accuracy(const std::map<std::string, double>& predicted, const OrderedPairs& gt) {
  auto value = [&](const std::string& id) {
    const auto it = predicted.find(id);
    if (it == predicted.end()) throw std::invalid_argument("ranking_accuracy: no prediction for id " + id);
    return it->second;
  };
  std::size_t ok_ordered = 0, ok_unordered = 0;
  for (const auto& [a, b] : gt.ordered) ok_ordered += value(a) > value(b);
  for (const auto& [a, b] : gt.unordered) ok_unordered += std::fabs(value(a) - value(b)) <= gt.gamma;
  RankingAccuracy r;
  r.ordered_pairs = gt.ordered.size();
  r.unordered_pairs = gt.unordered.size();
  const std::size_t total = r.ordered_pairs + r.unordered_pairs;
  r.combined = total ? double(ok_ordered + ok_unordered) / double(total) : 1.0;
  r.ordered_only = r.ordered_pairs ? double(ok_ordered) / double(r.ordered_pairs) : 1.0;
  return r;
}

/// L2-regularized logistic regression fit by full-batch gradient descent.
class LogisticRegression {
 public:
  struct Options {
    double l2 = 1e-3;
    int epochs = 500;
  };

  LogisticRegression() = default;
  explicit LogisticRegression(Options options) : options_(options) {}

  void fit(const std::vector<std::vector<double>>& x, const std::vector<int>& y) {
    if (x.empty() || x.size() != y.size()) throw std::invalid_argument("LogisticRegression: bad training set");
    const std::size_t n = x.size(), d = x[0].size();
    w_.assign(d, 0.0);
    b_ = 0.0;
    // Step 1/L with L bounding the curvature of the mean log-loss:
    // 0.25 * lambda_max(X'X / n) for the augmented design, plus l2.
    const double step = 1.0 / (0.25 * largest_eigenvalue(x) + options_.l2);
    std::vector<double> gw(d);
    for (int epoch = 0; epoch < options_.epochs; ++epoch) {
      std::fill(gw.begin(), gw.end(), 0.0);
      double gb = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double err = sigmoid(margin(x[i])) - double(y[i]);
        for (std::size_t k = 0; k < d; ++k) gw[k] += err * x[i][k];
        gb += err;
      }
      for (std::size_t k = 0; k < d; ++k) w_[k] -= step * (gw[k] / double(n) + options_.l2 * w_[k]);
      b_ -= step * gb / double(n);
    }
  }

  int predict(const std::vector<double>& x) const { return margin(x) > 0.0 ? 1 : 0; }
  const std::vector<double>& weights() const { return w_; }
  double bias() const { return b_; }

 private:
  static double sigmoid(double z) { return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

  double margin(const std::vector<double>& x) const {
    double z = b_;
    for (std::size_t k = 0; k < w_.size(); ++k) z += w_[k] * x[k];
    return z;
  }

  // Power iteration on the augmented (x, 1) second-moment matrix.
  static double largest_eigenvalue(const std::vector<std::vector<double>>& x) {
    const std::size_t n = x.size(), d = x[0].size() + 1;
    std::vector<double> v(d, 1.0 / std::sqrt(double(d))), next(d);
    double lambda = 1.0;
    for (int it = 0; it < 100; ++it) {
      std::fill(next.begin(), next.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        double dotv = v[d - 1];
        for (std::size_t k = 0; k + 1 < d; ++k) dotv += x[i][k] * v[k];
        for (std::size_t k = 0; k + 1 < d; ++k) next[k] += dotv * x[i][k];
        next[d - 1] += dotv;
      }
      double norm = 0.0;
      for (double& e : next) e /= double(n), norm += e * e;
      norm = std::sqrt(norm);
      if (norm == 0.0) return 1.0;
      lambda = norm;
      for (std::size_t k = 0; k < d; ++k) v[k] = next[k] / norm;
    }
    return lambda;
  }

  Options options_{};
  std::vector<double> w_;
  double b_ = 0.0;
};

/// Mean accuracy of a stratified k-fold cross-validation of
/// LogisticRegression. Fold assignment is a seeded shuffle within each class.
inline double train_linear(const std::vector<std::vector<double>>& x, const std::vector<int>& labels, int folds = 5,
                           std::uint64_t seed = 0, LogisticRegression::Options options = {}) {
  if (x.size() != labels.size()) throw std::invalid_argument("train_linear: descriptor/label count mismatch");
  if (folds < 2) throw std::invalid_argument("train_linear: need at least 2 folds");
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw std::invalid_argument("train_linear: labels must be 0 or 1");
    by_class[std::size_t(labels[i])].push_back(i);
  }
  if (by_class[0].size() < 2 || by_class[1].size() < 2)
    throw std::invalid_argument("train_linear: degenerate labels, need at least 2 examples per class");

  Rng rng(seed);
  std::vector<int> fold_of(x.size());
  for (auto& members : by_class) {
    for (std::size_t i = members.size(); i > 1; --i)
      std::swap(members[i - 1], members[std::size_t(rng.uniform_int(0, std::int64_t(i) - 1))]);
    for (std::size_t k = 0; k < members.size(); ++k) fold_of[members[k]] = int(k % std::size_t(folds));
  }

  double sum = 0.0;
  int used = 0;
  for (int f = 0; f < folds; ++f) {
    std::vector<std::vector<double>> tx;
    std::vector<int> ty;
    std::vector<std::size_t> test;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (fold_of[i] == f) {
        test.push_back(i);
      } else {
        tx.push_back(x[i]);
        ty.push_back(labels[i]);
      }
    }
    if (test.empty()) continue;
    LogisticRegression model(options);
    model.fit(tx, ty);
    std::size_t ok = 0;
    for (std::size_t i : test) ok += model.predict(x[i]) == labels[i];
    sum += double(ok) / double(test.size());
    ++used;
  }
  return used ? sum / used : 0.0;
}

}  // namespace texelatt
