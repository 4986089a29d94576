#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "adaclk/features.hpp"

namespace adaclk {

// ---------------------------------------------------------------------------
// Decision trees and random forest
// ---------------------------------------------------------------------------

struct TreeNode {
  bool is_leaf = true;
  int feature = -1;        // internal: feature index 0..8
  double threshold = 0.0;  // go left if x[feature] <= threshold
  int left = -1;
  int right = -1;
  Eigen::VectorXd class_counts; // leaf only, integer-valued
};

struct DecisionTree {
  std::vector<TreeNode> nodes; // node 0 is the root
  int max_depth = 0;
  int n_classes = 0;

  int leaf_index(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  const Eigen::VectorXd& leaf_counts(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  int depth() const;
  int internal_node_count() const;
};

/// CART with Gini impurity; each split considers a random subset of
/// ceil(sqrt(9)) = 3 features. Stops at max_depth, purity, or <2 samples.
DecisionTree train_tree(const Eigen::MatrixXd& X, const std::vector<int>& y,
                        int n_classes, int max_depth, int feature_subset_size,
                        std::uint64_t seed);

struct RandomForest {
  std::vector<DecisionTree> trees;
  int n_estimators = 0;
  int max_depth = 0;
  int n_classes = 0;
  std::uint64_t seed = 0;

  int comparator_count() const; // total internal nodes across trees
};

/// Bootstrap resample per tree (same size as the data), per-tree RNG
/// streams derived from the master seed by tree index.
RandomForest rf_train(const Eigen::MatrixXd& X, const std::vector<int>& y,
                      int n_estimators, int max_depth, std::uint64_t seed);

/// Argmax of summed leaf class counts; ties break toward the higher
/// (slower) class.
int rf_predict(const RandomForest& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Summed leaf class counts, before the argmax.
Eigen::VectorXd rf_vote(const RandomForest& model,
                        const Eigen::Ref<const Eigen::VectorXd>& x);

// Forest persistence, flat text format "rffmt v1".
std::string serialize(const RandomForest& model);
RandomForest deserialize_forest(const std::string& text,
                                const std::string& origin = "<string>");
void save_forest(const RandomForest& model, const std::string& path);
RandomForest load_forest(const std::string& path);

// ---------------------------------------------------------------------------
// Multi-layer perceptron
// ---------------------------------------------------------------------------

enum class Activation { Identity, Tanh, Logistic, Relu };
enum class MlpSolver { Sgd, Lbfgs, Adam };

const char* to_string(Activation a);
Activation activation_from_string(const std::string& s);
const char* to_string(MlpSolver s);
MlpSolver solver_from_string(const std::string& s);

struct MlpModel {
  std::vector<int> layer_sizes; // input, hidden..., output
  std::vector<Eigen::MatrixXd> weights; // weights[l]: sizes[l+1] x sizes[l]
  std::vector<Eigen::VectorXd> biases;
  Activation activation = Activation::Relu;

  Eigen::VectorXd logits(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  int predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

struct MlpOptions {
  std::vector<int> hidden; // e.g. {20, 10}
  Activation activation = Activation::Relu;
  MlpSolver solver = MlpSolver::Adam;
  int epochs = 200;
  double learning_rate = 1e-3;
  int batch_size = 32;
};

/// Softmax cross-entropy objective trained by backpropagation; the
/// returned model's final loss does not exceed its initial loss.
MlpModel mlp_train(const Eigen::MatrixXd& X, const std::vector<int>& y,
                   int n_classes, const MlpOptions& opts, std::uint64_t seed);

double mlp_loss(const MlpModel& m, const Eigen::MatrixXd& X, const std::vector<int>& y);

/// Flattened backprop gradient of the mean cross-entropy loss; layout
/// matches flatten_params(). Exposed for finite-difference checking.
Eigen::VectorXd mlp_gradient(const MlpModel& m, const Eigen::MatrixXd& X,
                             const std::vector<int>& y);
Eigen::VectorXd flatten_params(const MlpModel& m);
void unflatten_params(MlpModel& m, const Eigen::Ref<const Eigen::VectorXd>& theta);

// ---------------------------------------------------------------------------
// Kernel SVM (one-vs-rest, Pegasos-style sub-gradient training)
// ---------------------------------------------------------------------------

enum class SvmKernel { Linear, Poly, Rbf };
enum class GammaMode { Scale, Auto }; // scale: 1/(N*Var), auto: 1/N

const char* to_string(SvmKernel k);
SvmKernel svm_kernel_from_string(const std::string& s);
const char* to_string(GammaMode g);
GammaMode gamma_mode_from_string(const std::string& s);

struct SvmOptions {
  SvmKernel kernel = SvmKernel::Rbf;
  int degree = 3; // poly only, [2,15]
  GammaMode gamma_mode = GammaMode::Scale;
  int epochs = 20;
  double lambda = 1e-4;
};

struct SvmModel {
  SvmKernel kernel = SvmKernel::Rbf;
  int degree = 3;
  double gamma = 0.0;
  double scale = 1.0;              // 1/(lambda*T) decision scaling
  Eigen::MatrixXd support_vectors; // rows
  Eigen::MatrixXd alpha;           // n_support x n_classes, signed coefficients

  int n_support() const { return static_cast<int>(support_vectors.rows()); }
  Eigen::VectorXd decision(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  int predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

double svm_gamma(GammaMode mode, const Eigen::MatrixXd& X);

SvmModel svm_train(const Eigen::MatrixXd& X, const std::vector<int>& y,
                   int n_classes, const SvmOptions& opts, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Scoring, cross-validation, grid search
// ---------------------------------------------------------------------------

using Confusion = Eigen::MatrixXi; // rows: true class, cols: predicted

double f1_macro(const Confusion& confusion);
double f1_weighted(const Confusion& confusion);

/// Trains on (X, y) and returns a predictor.
using Trainer = std::function<std::function<int(const Eigen::Ref<const Eigen::VectorXd>&)>(
    const Eigen::MatrixXd& X, const std::vector<int>& y, std::uint64_t seed)>;

struct CvReport {
  std::vector<double> fold_f1;
  double mean_f1 = 0.0;
  Confusion confusion; // pooled over folds
  double wall_seconds = 0.0;
};

/// Stratified K-fold; per-fold seeds derived from the master seed.
CvReport kfold_cv(const Trainer& trainer, const Eigen::MatrixXd& X,
                  const std::vector<int>& y, int n_classes, int k,
                  std::uint64_t seed);

struct GridRow {
  std::string params; // human-readable hyperparameter summary
  double f1 = 0.0;
  double speedup = 0.0;           // 0 if no evaluation context
  double hw_cost_mtransistors = 0.0;
  double sph = 0.0;
  bool top = false; // within 1% of the best F1
};

enum class ModelFamily { Rf, Nn, Svm };
const char* to_string(ModelFamily f);
ModelFamily model_family_from_string(const std::string& s);

struct RfGrid {
  std::vector<int> n_estimators{1, 10, 50, 100, 200};
  std::vector<int> max_depth{10, 20, 30, 40, 50};
};

struct NnGrid {
  std::vector<Activation> activations{Activation::Identity, Activation::Tanh,
                                      Activation::Logistic, Activation::Relu};
  std::vector<MlpSolver> solvers{MlpSolver::Sgd, MlpSolver::Lbfgs, MlpSolver::Adam};
  std::vector<std::vector<int>> hidden{{5}, {10}, {15}, {20}, {20, 5}, {20, 10}, {20, 15}};
};

struct SvmGrid {
  std::vector<SvmKernel> kernels{SvmKernel::Linear, SvmKernel::Poly, SvmKernel::Rbf};
  std::vector<int> degrees{2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15};
  std::vector<GammaMode> gamma_modes{GammaMode::Scale, GammaMode::Auto};
};

/// Optional per-point evaluation hook: given a model trained on the full
/// dataset, returns (speedup, hw cost in million transistors).
struct GridEval {
  std::function<std::pair<double, double>(const Trainer& trainer,
                                          const std::string& params)> evaluate;
};

std::vector<GridRow> grid_search_rf(const RfGrid& grid, const Eigen::MatrixXd& X,
                                    const std::vector<int>& y, int n_classes,
                                    std::uint64_t seed, const GridEval* eval = nullptr);
std::vector<GridRow> grid_search_nn(const NnGrid& grid, const Eigen::MatrixXd& X,
                                    const std::vector<int>& y, int n_classes,
                                    std::uint64_t seed, const GridEval* eval = nullptr);
std::vector<GridRow> grid_search_svm(const SvmGrid& grid, const Eigen::MatrixXd& X,
                                     const std::vector<int>& y, int n_classes,
                                     std::uint64_t seed, const GridEval* eval = nullptr);

/// Grid CSV mirroring the report tables: params, F1-score, Speedup,
/// HW cost, SPH, top flag.
std::string format_grid_csv(const std::vector<GridRow>& rows);

} // namespace adaclk
