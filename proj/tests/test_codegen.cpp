#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "adaclk/codegen.hpp"
#include "adaclk/oracle.hpp"
#include "adaclk/rng.hpp"

using namespace adaclk;

namespace {

int netlist_predict(const ForestNetlist& fn, const std::vector<std::int32_t>& q) {
  const auto stim = encode_quantized(fn, q);
  const std::vector<std::uint8_t> zero(stim.size(), 0);
  const DelayMeasurement m = settle(fn.netlist, zero, stim);
  return decode_class(fn, m.output_word);
}

RandomForest blob_forest(int n_trees, int depth, int n_classes, std::uint64_t seed) {
  Rng rng(seed);
  const int n = 100 * n_classes;
  Eigen::MatrixXd X(n, kNumFeatures);
  std::vector<int> y;
  for (int i = 0; i < n; ++i) {
    const int label = i % n_classes;
    X.row(i).setZero();
    X(i, 0) = 1;
    X(i, 4) = 3.0 * label + rng.real() - 0.5;
    X(i, 5) = rng.real() * 2.0 - 1.0;
    X(i, 8) = rng.real() * 2.0 - 1.0;
    y.push_back(label);
  }
  return rf_train(X, y, n_trees, depth, seed);
}

} // namespace

TEST_CASE("fixed point quantization") {
  const FixedPointSpec fp; // Q8.8
  CHECK(quantize(1.0, fp) == 256);
  CHECK(quantize(-1.5, fp) == -384);
  CHECK(dequantize(quantize(0.25, fp), fp) == doctest::Approx(0.25));
  CHECK_THROWS(quantize(200.0, fp)); // exceeds the signed 16-bit range
  FeatureVector fv = FeatureVector::Zero();
  fv(4) = 1e9; // saturates instead of throwing
  const auto q = quantize_features(fv, fp);
  CHECK(q[4] == 32767);
  fv(4) = -1e9;
  CHECK(quantize_features(fv, fp)[4] == -32768);

  FixedPointSpec bad;
  bad.fraction_bits = 20;
  CHECK_THROWS(validate(bad));
}

TEST_CASE("single-leaf tree compiles to a constant netlist") {
  RandomForest f;
  f.n_estimators = 1;
  f.max_depth = 1;
  f.n_classes = 2;
  DecisionTree t;
  t.n_classes = 2;
  TreeNode leaf;
  leaf.is_leaf = true;
  leaf.class_counts = Eigen::Vector2d(1, 3);
  t.nodes.push_back(leaf);
  f.trees.push_back(t);

  const ForestNetlist fn = forest_to_netlist(f, FixedPointSpec{});
  CHECK(fn.comparators_physical == 0);
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    std::vector<std::int32_t> q(kNumFeatures);
    for (auto& v : q) v = static_cast<std::int32_t>(rng.below(65536)) - 32768;
    CHECK(netlist_predict(fn, q) == 1);
  }
}

TEST_CASE("depth-1 stump matches software exhaustively on the split feature") {
  RandomForest f;
  f.n_estimators = 1;
  f.max_depth = 1;
  f.n_classes = 2;
  DecisionTree t;
  t.n_classes = 2;
  TreeNode root;
  root.is_leaf = false;
  root.feature = 4;
  root.threshold = 0.372; // not exactly representable in Q8.8
  root.left = 1;
  root.right = 2;
  TreeNode l, r;
  l.class_counts = Eigen::Vector2d(5, 1);
  r.class_counts = Eigen::Vector2d(1, 5);
  t.nodes = {root, l, r};
  f.trees.push_back(t);

  const FixedPointSpec fp;
  const ForestNetlist fn = forest_to_netlist(f, fp);
  CHECK(fn.comparators_physical == 1);
  for (int code = -32768; code < 32768; ++code) {
    std::vector<std::int32_t> q(kNumFeatures, 0);
    q[4] = code;
    const int sw = rf_predict(f, dequantize_features(q, fp));
    REQUIRE(netlist_predict(fn, q) == sw);
  }
}

TEST_CASE("multi-tree forest equals rf_predict on random quantized vectors") {
  for (int n_classes : {2, 3, 4}) {
    const RandomForest f = blob_forest(10, 6, n_classes, 1000 + n_classes);
    const FixedPointSpec fp;
    const ForestNetlist fn = forest_to_netlist(f, fp);
    CHECK(fn.comparators_physical == f.comparator_count());
    CHECK(fn.n_classes == n_classes);
    Rng rng(static_cast<std::uint64_t>(n_classes));
    for (int i = 0; i < 1500; ++i) {
      std::vector<std::int32_t> q(kNumFeatures);
      for (auto& v : q) v = static_cast<std::int32_t>(rng.below(65536)) - 32768;
      const int sw = rf_predict(f, dequantize_features(q, fp));
      REQUIRE(netlist_predict(fn, q) == sw);
    }
  }
}

TEST_CASE("threshold overflow is rejected") {
  RandomForest f;
  f.n_estimators = 1;
  f.max_depth = 1;
  f.n_classes = 2;
  DecisionTree t;
  t.n_classes = 2;
  TreeNode root;
  root.is_leaf = false;
  root.feature = 4;
  root.threshold = 1e6;
  root.left = 1;
  root.right = 2;
  TreeNode l, r;
  l.class_counts = Eigen::Vector2d(1, 0);
  r.class_counts = Eigen::Vector2d(0, 1);
  t.nodes = {root, l, r};
  f.trees.push_back(t);
  CHECK_THROWS(forest_to_netlist(f, FixedPointSpec{}));
  CHECK_THROWS(forest_to_netlist(RandomForest{}, FixedPointSpec{}));
}

TEST_CASE("generated netlist is structurally valid and acyclic") {
  const RandomForest f = blob_forest(5, 5, 3, 77);
  const ForestNetlist fn = forest_to_netlist(f, FixedPointSpec{});
  validate(fn.netlist);
  CHECK(static_longest_path(fn.netlist) > 0);
}
