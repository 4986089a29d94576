#include "adaclk/ml.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "adaclk/rng.hpp"

namespace adaclk {

int DecisionTree::leaf_index(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  int i = 0;
  while (!nodes[static_cast<std::size_t>(i)].is_leaf) {
    const TreeNode& nd = nodes[static_cast<std::size_t>(i)];
    i = x(nd.feature) <= nd.threshold ? nd.left : nd.right;
  }
  return i;
}

const Eigen::VectorXd& DecisionTree::leaf_counts(
    const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return nodes[static_cast<std::size_t>(leaf_index(x))].class_counts;
}

int DecisionTree::depth() const {
  // iterative DFS from root with depth tracking
  std::vector<std::pair<int, int>> stack{{0, 0}};
  int best = 0;
  while (!stack.empty()) {
    const auto [i, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    const TreeNode& nd = nodes[static_cast<std::size_t>(i)];
    if (!nd.is_leaf) {
      stack.push_back({nd.left, d + 1});
      stack.push_back({nd.right, d + 1});
    }
  }
  return best;
}

int DecisionTree::internal_node_count() const {
  int c = 0;
  for (const TreeNode& nd : nodes)
    if (!nd.is_leaf) ++c;
  return c;
}

namespace {

struct TreeBuilder {
  const Eigen::MatrixXd& X;
  const std::vector<int>& y;
  int n_classes;
  int max_depth;
  int subset_size;
  Rng rng;
  DecisionTree tree;

  Eigen::VectorXd counts_of(const std::vector<int>& idx) const {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n_classes);
    for (int i : idx) c(y[static_cast<std::size_t>(i)]) += 1.0;
    return c;
  }

  static double gini(const Eigen::VectorXd& counts, double n) {
    if (n <= 0.0) return 0.0;
    double s = 0.0;
    for (Eigen::Index k = 0; k < counts.size(); ++k) {
      const double p = counts(k) / n;
      s += p * p;
    }
    return 1.0 - s;
  }

  struct Split {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double score = 0.0; // weighted Gini
  };

  Split best_split_on(const std::vector<int>& idx, int feature,
                      const Eigen::VectorXd& total) const {
    const double n = static_cast<double>(idx.size());
    std::vector<int> order = idx;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const double va = X(a, feature), vb = X(b, feature);
      return va != vb ? va < vb : a < b;
    });
    Split best;
    Eigen::VectorXd left = Eigen::VectorXd::Zero(n_classes);
    Eigen::VectorXd right = total;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      const int r = order[i];
      left(y[static_cast<std::size_t>(r)]) += 1.0;
      right(y[static_cast<std::size_t>(r)]) -= 1.0;
      const double v0 = X(r, feature);
      const double v1 = X(order[i + 1], feature);
      if (v0 == v1) continue;
      const double nl = static_cast<double>(i + 1);
      const double nr = n - nl;
      const double score = (nl * gini(left, nl) + nr * gini(right, nr)) / n;
      if (!best.found || score < best.score) {
        best.found = true;
        best.feature = feature;
        best.threshold = 0.5 * (v0 + v1);
        best.score = score;
      }
    }
    return best;
  }

  int build(std::vector<int> idx, int depth) {
    const Eigen::VectorXd total = counts_of(idx);
    const bool pure = (total.array() > 0.0).count() <= 1;
    auto make_leaf = [&]() {
      TreeNode nd;
      nd.is_leaf = true;
      nd.class_counts = total;
      tree.nodes.push_back(nd);
      return static_cast<int>(tree.nodes.size()) - 1;
    };
    if (pure || depth >= max_depth || idx.size() < 2) return make_leaf();

    // random feature subset, then full fallback if it yields no split
    std::vector<int> features(kNumFeatures);
    std::iota(features.begin(), features.end(), 0);
    for (int i = 0; i < subset_size; ++i) {
      const std::size_t j = static_cast<std::size_t>(i) +
                            rng.below(static_cast<std::uint64_t>(kNumFeatures - i));
      std::swap(features[static_cast<std::size_t>(i)], features[j]);
    }
    std::sort(features.begin(), features.begin() + subset_size);

    Split best;
    for (int i = 0; i < subset_size; ++i) {
      const Split s = best_split_on(idx, features[static_cast<std::size_t>(i)], total);
      if (s.found && (!best.found || s.score < best.score)) best = s;
    }
    if (!best.found) {
      for (int f = 0; f < kNumFeatures; ++f) {
        const Split s = best_split_on(idx, f, total);
        if (s.found && (!best.found || s.score < best.score)) best = s;
      }
    }
    if (!best.found) return make_leaf();

    std::vector<int> left_idx, right_idx;
    for (int i : idx)
      (X(i, best.feature) <= best.threshold ? left_idx : right_idx).push_back(i);
    idx.clear();
    idx.shrink_to_fit();

    TreeNode nd;
    nd.is_leaf = false;
    nd.feature = best.feature;
    nd.threshold = best.threshold;
    tree.nodes.push_back(nd);
    const int self = static_cast<int>(tree.nodes.size()) - 1;
    const int li = build(std::move(left_idx), depth + 1);
    const int ri = build(std::move(right_idx), depth + 1);
    tree.nodes[static_cast<std::size_t>(self)].left = li;
    tree.nodes[static_cast<std::size_t>(self)].right = ri;
    return self;
  }
};

} // namespace

DecisionTree train_tree(const Eigen::MatrixXd& X, const std::vector<int>& y,
                        int n_classes, int max_depth, int feature_subset_size,
                        std::uint64_t seed) {
  if (X.rows() == 0) throw std::runtime_error("train_tree: empty data");
  if (X.rows() != static_cast<Eigen::Index>(y.size()))
    throw std::runtime_error("train_tree: X/y size mismatch");
  for (int lbl : y)
    if (lbl < 0 || lbl >= n_classes)
      throw std::runtime_error("train_tree: label out of range");
  TreeBuilder b{X, y, n_classes, max_depth,
                std::min(feature_subset_size, kNumFeatures), Rng(seed), {}};
  std::vector<int> all(static_cast<std::size_t>(X.rows()));
  std::iota(all.begin(), all.end(), 0);
  // build() appends nodes preorder; root lands at index 0
  b.build(std::move(all), 0);
  b.tree.max_depth = max_depth;
  b.tree.n_classes = n_classes;
  return std::move(b.tree);
}

int RandomForest::comparator_count() const {
  int c = 0;
  for (const DecisionTree& t : trees) c += t.internal_node_count();
  return c;
}

RandomForest rf_train(const Eigen::MatrixXd& X, const std::vector<int>& y,
                      int n_estimators, int max_depth, std::uint64_t seed) {
  if (n_estimators < 1 || max_depth < 1)
    throw std::runtime_error("rf_train: hyperparameters must be positive");
  if (X.rows() == 0) throw std::runtime_error("rf_train: empty data");
  RandomForest model;
  model.n_estimators = n_estimators;
  model.max_depth = max_depth;
  model.n_classes = *std::max_element(y.begin(), y.end()) + 1;
  for (int lbl : y) model.n_classes = std::max(model.n_classes, lbl + 1);
  model.seed = seed;
  const Eigen::Index n = X.rows();
  const int subset = 3; // ceil(sqrt(9))
  for (int t = 0; t < n_estimators; ++t) {
    const std::uint64_t tree_seed = derive_seed(seed, static_cast<std::uint64_t>(t));
    Rng boot(derive_seed(tree_seed, 0x626f6f74));
    Eigen::MatrixXd Xb(n, X.cols());
    std::vector<int> yb(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index j =
          static_cast<Eigen::Index>(boot.below(static_cast<std::uint64_t>(n)));
      Xb.row(i) = X.row(j);
      yb[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(j)];
    }
    model.trees.push_back(
        train_tree(Xb, yb, model.n_classes, max_depth, subset, tree_seed));
  }
  return model;
}

Eigen::VectorXd rf_vote(const RandomForest& model,
                        const Eigen::Ref<const Eigen::VectorXd>& x) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(model.n_classes);
  for (const DecisionTree& t : model.trees) sum += t.leaf_counts(x);
  return sum;
}

int rf_predict(const RandomForest& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Eigen::VectorXd v = rf_vote(model, x);
  int best = 0;
  for (int k = 1; k < model.n_classes; ++k)
    if (v(k) >= v(best)) best = k; // ties toward the slower class
  return best;
}

std::string serialize(const RandomForest& model) {
  std::ostringstream out;
  out << "rffmt v1\n";
  out << "forest n_estimators=" << model.n_estimators
      << " max_depth=" << model.max_depth << " n_classes=" << model.n_classes
      << " seed=" << model.seed << "\n";
  char buf[64];
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    const DecisionTree& tree = model.trees[t];
    out << "tree " << t << " nodes=" << tree.nodes.size() << "\n";
    for (std::size_t j = 0; j < tree.nodes.size(); ++j) {
      const TreeNode& nd = tree.nodes[j];
      if (nd.is_leaf) {
        out << "node " << j << " leaf";
        for (Eigen::Index k = 0; k < nd.class_counts.size(); ++k) {
          std::snprintf(buf, sizeof buf, " %.0f", nd.class_counts(k));
          out << buf;
        }
        out << "\n";
      } else {
        std::snprintf(buf, sizeof buf, " %.17g ", nd.threshold);
        out << "node " << j << " split " << nd.feature << buf << nd.left << " "
            << nd.right << "\n";
      }
    }
  }
  return out.str();
}

RandomForest deserialize_forest(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "rffmt v1")
    throw std::runtime_error(origin + ": bad rffmt header");
  RandomForest model;
  auto read_kv = [&](std::istringstream& ls, const char* key) -> long long {
    std::string tok;
    if (!(ls >> tok) || tok.rfind(key, 0) != 0)
      throw std::runtime_error(origin + ": expected " + key);
    // seed values use the full u64 range
    return static_cast<long long>(std::stoull(tok.substr(std::string(key).size())));
  };
  {
    if (!std::getline(in, line)) throw std::runtime_error(origin + ": truncated");
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word != "forest") throw std::runtime_error(origin + ": expected forest line");
    model.n_estimators = static_cast<int>(read_kv(ls, "n_estimators="));
    model.max_depth = static_cast<int>(read_kv(ls, "max_depth="));
    model.n_classes = static_cast<int>(read_kv(ls, "n_classes="));
    model.seed = static_cast<std::uint64_t>(read_kv(ls, "seed="));
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "tree") {
      std::size_t idx;
      ls >> idx;
      const long long n_nodes = read_kv(ls, "nodes=");
      if (idx != model.trees.size())
        throw std::runtime_error(origin + ": tree index out of order");
      DecisionTree t;
      t.max_depth = model.max_depth;
      t.n_classes = model.n_classes;
      t.nodes.reserve(static_cast<std::size_t>(n_nodes));
      model.trees.push_back(std::move(t));
    } else if (word == "node") {
      if (model.trees.empty()) throw std::runtime_error(origin + ": node before tree");
      DecisionTree& t = model.trees.back();
      std::size_t j;
      std::string kind;
      ls >> j >> kind;
      if (j != t.nodes.size()) throw std::runtime_error(origin + ": node out of order");
      TreeNode nd;
      if (kind == "split") {
        nd.is_leaf = false;
        if (!(ls >> nd.feature >> nd.threshold >> nd.left >> nd.right))
          throw std::runtime_error(origin + ": bad split node");
      } else if (kind == "leaf") {
        std::vector<double> counts;
        double v;
        while (ls >> v) counts.push_back(v);
        if (static_cast<int>(counts.size()) != model.n_classes)
          throw std::runtime_error(origin + ": leaf count width mismatch");
        nd.class_counts = Eigen::Map<Eigen::VectorXd>(counts.data(),
                                                      static_cast<Eigen::Index>(counts.size()));
      } else {
        throw std::runtime_error(origin + ": unknown node kind " + kind);
      }
      t.nodes.push_back(std::move(nd));
    } else {
      throw std::runtime_error(origin + ": unknown directive " + word);
    }
  }
  if (static_cast<int>(model.trees.size()) != model.n_estimators)
    throw std::runtime_error(origin + ": tree count mismatch");
  return model;
}

void save_forest(const RandomForest& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << serialize(model);
}

RandomForest load_forest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_forest(ss.str(), path);
}

} // namespace adaclk
