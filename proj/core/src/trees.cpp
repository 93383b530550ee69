#include "clipforge/trees.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "clipforge/rng.hpp"

namespace clipforge {

namespace {

double mean_of(const std::vector<double>& y, const std::vector<size_t>& rows, size_t begin,
               size_t end) {
  double s = 0.0;
  for (size_t i = begin; i < end; ++i) s += y[rows[i]];
  return s / static_cast<double>(end - begin);
}

}  // namespace

int RegressionTree::build(const FeatureMatrix& x, const std::vector<double>& y,
                          std::vector<size_t>& rows, size_t begin, size_t end, int depth,
                          const TreeParams& params, int features_per_split, SplitMix64& rng) {
  const size_t n = end - begin;
  const int node_index = static_cast<int>(nodes_.size());
  nodes_.push_back({});
  nodes_[node_index].value = mean_of(y, rows, begin, end);

  if (depth >= params.max_depth || n < static_cast<size_t>(params.min_samples_split))
    return node_index;

  const size_t d = x[0].size();
  std::vector<int> candidates(d);
  std::iota(candidates.begin(), candidates.end(), 0);
  if (features_per_split > 0 && static_cast<size_t>(features_per_split) < d) {
    // Partial Fisher-Yates, then sorted so probing order is canonical.
    for (int i = 0; i < features_per_split; ++i) {
      const size_t j = i + rng.next_below(d - i);
      std::swap(candidates[i], candidates[j]);
    }
    candidates.resize(features_per_split);
    std::sort(candidates.begin(), candidates.end());
  }

  double total_sum = 0.0, total_sq = 0.0;
  for (size_t i = begin; i < end; ++i) {
    total_sum += y[rows[i]];
    total_sq += y[rows[i]] * y[rows[i]];
  }
  const double parent_sse = total_sq - total_sum * total_sum / static_cast<double>(n);

  int best_feature = -1;
  double best_threshold = 0.0, best_sse = parent_sse - 1e-12;
  std::vector<size_t> order(rows.begin() + begin, rows.begin() + end);
  for (int f : candidates) {
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      if (x[a][f] != x[b][f]) return x[a][f] < x[b][f];
      return a < b;
    });
    double left_sum = 0.0, left_sq = 0.0;
    for (size_t i = 0; i + 1 < order.size(); ++i) {
      const double v = y[order[i]];
      left_sum += v;
      left_sq += v * v;
      if (x[order[i]][f] == x[order[i + 1]][f]) continue;
      const size_t nl = i + 1, nr = order.size() - nl;
      if (nl < static_cast<size_t>(params.min_samples_leaf) ||
          nr < static_cast<size_t>(params.min_samples_leaf))
        continue;
      const double right_sum = total_sum - left_sum;
      const double right_sq = total_sq - left_sq;
      const double sse = (left_sq - left_sum * left_sum / static_cast<double>(nl)) +
                         (right_sq - right_sum * right_sum / static_cast<double>(nr));
      if (sse < best_sse) {
        best_sse = sse;
        best_feature = f;
        best_threshold = 0.5 * (x[order[i]][f] + x[order[i + 1]][f]);
      }
    }
  }
  if (best_feature < 0) return node_index;

  const auto mid = std::partition(rows.begin() + begin, rows.begin() + end, [&](size_t r) {
    return x[r][best_feature] <= best_threshold;
  });
  const size_t split = static_cast<size_t>(mid - rows.begin());
  if (split == begin || split == end) return node_index;

  nodes_[node_index].feature = best_feature;
  nodes_[node_index].threshold = best_threshold;
  const int left = build(x, y, rows, begin, split, depth + 1, params, features_per_split, rng);
  const int right = build(x, y, rows, split, end, depth + 1, params, features_per_split, rng);
  nodes_[node_index].left = left;
  nodes_[node_index].right = right;
  return node_index;
}

void RegressionTree::fit(const FeatureMatrix& x, const std::vector<double>& y,
                         const std::vector<size_t>& rows, const TreeParams& params,
                         int features_per_split, SplitMix64& rng) {
  if (x.empty() || y.size() != x.size()) throw std::invalid_argument("tree: bad training data");
  if (rows.empty()) throw std::invalid_argument("tree: empty row set");
  nodes_.clear();
  std::vector<size_t> work(rows);
  build(x, y, work, 0, work.size(), 0, params, features_per_split, rng);
}

double RegressionTree::predict(const std::vector<double>& features) const {
  int i = 0;
  while (nodes_[i].feature >= 0)
    i = features[nodes_[i].feature] <= nodes_[i].threshold ? nodes_[i].left : nodes_[i].right;
  return nodes_[i].value;
}

nlohmann::json RegressionTree::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& n : nodes_)
    arr.push_back({n.feature, n.threshold, n.value, n.left, n.right});
  return arr;
}

RegressionTree RegressionTree::from_json(const nlohmann::json& j) {
  RegressionTree t;
  for (const auto& e : j) {
    Node n;
    n.feature = e.at(0).get<int>();
    n.threshold = e.at(1).get<double>();
    n.value = e.at(2).get<double>();
    n.left = e.at(3).get<int>();
    n.right = e.at(4).get<int>();
    t.nodes_.push_back(n);
  }
  return t;
}

void RandomForestRegressor::fit(const FeatureMatrix& x, const std::vector<double>& y,
                                const ForestParams& params, uint64_t seed) {
  if (x.empty()) throw std::invalid_argument("forest: empty training set");
  trees_.assign(static_cast<size_t>(params.n_trees), {});
  const size_t n = x.size();
  const size_t d = x[0].size();
  const int features_per_split =
      params.sqrt_features ? std::max(1, static_cast<int>(std::sqrt(static_cast<double>(d))))
                           : 0;
  for (int t = 0; t < params.n_trees; ++t) {
    SplitMix64 rng(hash_combine(seed, static_cast<uint64_t>(t) + 1));
    std::vector<size_t> rows(n);
    if (params.bootstrap) {
      for (auto& r : rows) r = rng.next_below(n);
      std::sort(rows.begin(), rows.end());
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    trees_[static_cast<size_t>(t)].fit(x, y, rows, params.tree, features_per_split, rng);
  }
}

double RandomForestRegressor::predict(const std::vector<double>& features) const {
  if (trees_.empty()) throw std::logic_error("forest: not fitted");
  double s = 0.0;
  for (const auto& t : trees_) s += t.predict(features);
  return s / static_cast<double>(trees_.size());
}

nlohmann::json RandomForestRegressor::to_json() const {
  nlohmann::json j;
  j["trees"] = nlohmann::json::array();
  for (const auto& t : trees_) j["trees"].push_back(t.to_json());
  return j;
}

RandomForestRegressor RandomForestRegressor::from_json(const nlohmann::json& j) {
  RandomForestRegressor f;
  for (const auto& t : j.at("trees")) f.trees_.push_back(RegressionTree::from_json(t));
  return f;
}

void GradientBoostRegressor::fit(const FeatureMatrix& x, const std::vector<double>& y,
                                 const BoostParams& params, uint64_t seed) {
  if (x.empty()) throw std::invalid_argument("boost: empty training set");
  const size_t n = x.size();
  learning_rate_ = params.learning_rate;
  base_ = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  trees_.clear();

  std::vector<double> pred(n, base_), residual(n);
  const size_t rows_per_round =
      std::max<size_t>(2, static_cast<size_t>(std::floor(params.subsample * n)));
  std::vector<size_t> all(n);
  std::iota(all.begin(), all.end(), 0);

  for (int round = 0; round < params.n_rounds; ++round) {
    SplitMix64 rng(hash_combine(seed, 0x9000 + static_cast<uint64_t>(round)));
    for (size_t i = 0; i < n; ++i) residual[i] = y[i] - pred[i];

    std::vector<size_t> rows;
    if (rows_per_round < n) {
      std::vector<size_t> pool(all);
      for (size_t i = 0; i < rows_per_round; ++i) {
        const size_t j = i + rng.next_below(n - i);
        std::swap(pool[i], pool[j]);
      }
      rows.assign(pool.begin(), pool.begin() + static_cast<long>(rows_per_round));
      std::sort(rows.begin(), rows.end());
    } else {
      rows = all;
    }

    RegressionTree tree;
    tree.fit(x, residual, rows, params.tree, 0, rng);
    for (size_t i = 0; i < n; ++i) pred[i] += learning_rate_ * tree.predict(x[i]);
    trees_.push_back(std::move(tree));
  }
}

double GradientBoostRegressor::predict(const std::vector<double>& features) const {
  double s = base_;
  for (const auto& t : trees_) s += learning_rate_ * t.predict(features);
  return s;
}

nlohmann::json GradientBoostRegressor::to_json() const {
  nlohmann::json j;
  j["base"] = base_;
  j["learning_rate"] = learning_rate_;
  j["trees"] = nlohmann::json::array();
  for (const auto& t : trees_) j["trees"].push_back(t.to_json());
  return j;
}

GradientBoostRegressor GradientBoostRegressor::from_json(const nlohmann::json& j) {
  GradientBoostRegressor g;
  g.base_ = j.at("base").get<double>();
  g.learning_rate_ = j.at("learning_rate").get<double>();
  for (const auto& t : j.at("trees")) g.trees_.push_back(RegressionTree::from_json(t));
  return g;
}

double r_squared(const std::vector<double>& truth, const std::vector<double>& predicted) {
  if (truth.empty() || truth.size() != predicted.size())
    throw std::invalid_argument("r_squared: mismatched inputs");
  const double mean = std::accumulate(truth.begin(), truth.end(), 0.0) /
                      static_cast<double>(truth.size());
  double sse = 0.0, sst = 0.0;
  for (size_t i = 0; i < truth.size(); ++i) {
    sse += (truth[i] - predicted[i]) * (truth[i] - predicted[i]);
    sst += (truth[i] - mean) * (truth[i] - mean);
  }
  if (sst == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return 1.0 - sse / sst;
}

}  // namespace clipforge
