#ifndef CLIPFORGE_TREES_HPP
#define CLIPFORGE_TREES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace clipforge {

class SplitMix64;

using FeatureMatrix = std::vector<std::vector<double>>;  // row-major samples

struct TreeParams {
  int max_depth = 12;
  int min_samples_leaf = 1;
  int min_samples_split = 2;
};

// CART regression tree with exact variance-reduction splits. Candidate
// features are probed in index order and ties keep the first best, so a fit
// is fully determined by (data, params, rng stream).
class RegressionTree {
 public:
  void fit(const FeatureMatrix& x, const std::vector<double>& y,
           const std::vector<size_t>& rows, const TreeParams& params, int features_per_split,
           SplitMix64& rng);
  double predict(const std::vector<double>& features) const;
  bool empty() const { return nodes_.empty(); }

  nlohmann::json to_json() const;
  static RegressionTree from_json(const nlohmann::json& j);

 private:
  struct Node {
    int feature = -1;  // -1 = leaf
    double threshold = 0.0;
    double value = 0.0;
    int left = -1, right = -1;
  };
  int build(const FeatureMatrix& x, const std::vector<double>& y, std::vector<size_t>& rows,
            size_t begin, size_t end, int depth, const TreeParams& params, int features_per_split,
            SplitMix64& rng);
  std::vector<Node> nodes_;
};

struct ForestParams {
  int n_trees = 100;
  TreeParams tree{.max_depth = 12};
  bool bootstrap = true;
  bool sqrt_features = true;  // feature subsampling sqrt(d) per split
};

// Bagged regression trees minimizing squared error.
class RandomForestRegressor {
 public:
  void fit(const FeatureMatrix& x, const std::vector<double>& y, const ForestParams& params,
           uint64_t seed);
  double predict(const std::vector<double>& features) const;
  size_t tree_count() const { return trees_.size(); }

  nlohmann::json to_json() const;
  static RandomForestRegressor from_json(const nlohmann::json& j);

 private:
  std::vector<RegressionTree> trees_;
};

struct BoostParams {
  int n_rounds = 200;
  TreeParams tree{.max_depth = 6};
  double learning_rate = 0.1;
  double subsample = 0.8;
};

// Least-squares gradient boosting: each round fits a tree to the residuals
// on a row subsample and adds it with the learning-rate shrinkage.
class GradientBoostRegressor {
 public:
  void fit(const FeatureMatrix& x, const std::vector<double>& y, const BoostParams& params,
           uint64_t seed);
  double predict(const std::vector<double>& features) const;
  size_t tree_count() const { return trees_.size(); }

  nlohmann::json to_json() const;
  static GradientBoostRegressor from_json(const nlohmann::json& j);

 private:
  double base_ = 0.0;
  double learning_rate_ = 0.1;
  std::vector<RegressionTree> trees_;
};

double r_squared(const std::vector<double>& truth, const std::vector<double>& predicted);

}  // namespace clipforge

#endif  // CLIPFORGE_TREES_HPP
