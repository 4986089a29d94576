#include <chrono>
#include <cstdio>
#include <iostream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "adaclk/ml.hpp"
#include "adaclk/rng.hpp"

namespace adaclk {

namespace {

// Per-class F1 values; classes with no true and no predicted samples get 0.
std::vector<double> per_class_f1(const Confusion& cm, bool* warned_empty) {
  const int C = static_cast<int>(cm.rows());
  std::vector<double> f1(static_cast<std::size_t>(C), 0.0);
  for (int k = 0; k < C; ++k) {
    const double tp = cm(k, k);
    const double fp = cm.col(k).sum() - tp;
    const double fn = cm.row(k).sum() - tp;
    if (cm.row(k).sum() == 0 && warned_empty) *warned_empty = true;
    if (tp > 0.0)
      f1[static_cast<std::size_t>(k)] = 2.0 * tp / (2.0 * tp + fp + fn);
  }
  return f1;
}

} // namespace

double f1_macro(const Confusion& cm) {
  bool warned = false;
  const std::vector<double> f1 = per_class_f1(cm, &warned);
  if (warned)
    std::cerr << "warning: class with no true samples scored as F1=0\n";
  double sum = 0.0;
  for (double v : f1) sum += v;
  return sum / static_cast<double>(f1.size());
}

double f1_weighted(const Confusion& cm) {
  const std::vector<double> f1 = per_class_f1(cm, nullptr);
  double sum = 0.0, total = 0.0;
  for (int k = 0; k < static_cast<int>(cm.rows()); ++k) {
    const double support = cm.row(k).sum();
    sum += f1[static_cast<std::size_t>(k)] * support;
    total += support;
  }
  return total > 0.0 ? sum / total : 0.0;
}

CvReport kfold_cv(const Trainer& trainer, const Eigen::MatrixXd& X,
                  const std::vector<int>& y, int n_classes, int k,
                  std::uint64_t seed) {
  if (k < 2) throw std::runtime_error("kfold_cv: K must be >= 2");
  if (X.rows() != static_cast<Eigen::Index>(y.size()))
    throw std::runtime_error("kfold_cv: X/y size mismatch");
  const auto start = std::chrono::steady_clock::now();

  // stratified: shuffle within each class, deal round-robin into folds
  std::vector<int> fold_of(y.size());
  {
    Rng rng(derive_seed(seed, 0xf01d));
    std::vector<std::vector<int>> by_class(static_cast<std::size_t>(n_classes));
    for (std::size_t i = 0; i < y.size(); ++i)
      by_class[static_cast<std::size_t>(y[i])].push_back(static_cast<int>(i));
    for (std::vector<int>& idx : by_class) {
      for (std::size_t i = idx.size(); i > 1; --i)
        std::swap(idx[i - 1], idx[rng.below(i)]);
      for (std::size_t i = 0; i < idx.size(); ++i)
        fold_of[static_cast<std::size_t>(idx[i])] = static_cast<int>(i) % k;
    }
  }

  CvReport report;
  report.confusion = Confusion::Zero(n_classes, n_classes);
  for (int fold = 0; fold < k; ++fold) {
    std::vector<int> train_rows, test_rows;
    for (std::size_t i = 0; i < y.size(); ++i)
      (fold_of[i] == fold ? test_rows : train_rows).push_back(static_cast<int>(i));
    Eigen::MatrixXd Xt(static_cast<Eigen::Index>(train_rows.size()), X.cols());
    std::vector<int> yt(train_rows.size());
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
      Xt.row(static_cast<Eigen::Index>(i)) = X.row(train_rows[i]);
      yt[i] = y[static_cast<std::size_t>(train_rows[i])];
    }
    const auto predictor =
        trainer(Xt, yt, derive_seed(seed, static_cast<std::uint64_t>(fold)));
    Confusion cm = Confusion::Zero(n_classes, n_classes);
    for (int r : test_rows) {
      const int pred = predictor(X.row(r).transpose());
      if (pred < 0 || pred >= n_classes)
        throw std::runtime_error("kfold_cv: predictor emitted out-of-range class");
      cm(y[static_cast<std::size_t>(r)], pred) += 1;
    }
    report.fold_f1.push_back(f1_macro(cm));
    report.confusion += cm;
  }
  report.mean_f1 = std::accumulate(report.fold_f1.begin(), report.fold_f1.end(), 0.0) /
                   static_cast<double>(k);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

const char* to_string(ModelFamily f) {
  switch (f) {
    case ModelFamily::Rf: return "rf";
    case ModelFamily::Nn: return "nn";
    case ModelFamily::Svm: return "svm";
  }
  return "?";
}

ModelFamily model_family_from_string(const std::string& s) {
  if (s == "rf") return ModelFamily::Rf;
  if (s == "nn") return ModelFamily::Nn;
  if (s == "svm") return ModelFamily::Svm;
  throw std::runtime_error("unknown model family: " + s);
}

namespace {

std::vector<GridRow> run_grid(
    const std::vector<std::pair<std::string, Trainer>>& points,
    const Eigen::MatrixXd& X, const std::vector<int>& y, int n_classes,
    std::uint64_t seed, const GridEval* eval) {
  if (points.empty()) throw std::runtime_error("grid_search: empty grid");
  std::vector<GridRow> rows;
  rows.reserve(points.size());
  for (const auto& [params, trainer] : points) {
    const CvReport cv = kfold_cv(trainer, X, y, n_classes, 5, seed);
    GridRow row;
    row.params = params;
    row.f1 = cv.mean_f1;
    if (eval && eval->evaluate) {
      const auto [speedup, cost] = eval->evaluate(trainer, params);
      row.speedup = speedup;
      row.hw_cost_mtransistors = cost;
      row.sph = cost > 0.0 ? speedup / cost : 0.0;
    }
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const GridRow& a, const GridRow& b) { return a.f1 > b.f1; });
  const double best = rows.front().f1;
  for (GridRow& r : rows) r.top = r.f1 >= best * 0.99;
  return rows;
}

} // namespace

std::vector<GridRow> grid_search_rf(const RfGrid& grid, const Eigen::MatrixXd& X,
                                    const std::vector<int>& y, int n_classes,
                                    std::uint64_t seed, const GridEval* eval) {
  std::vector<std::pair<std::string, Trainer>> points;
  for (int n_est : grid.n_estimators)
    for (int depth : grid.max_depth) {
      std::ostringstream name;
      name << "rf n_estimators=" << n_est << " max_depth=" << depth;
      points.emplace_back(name.str(), [n_est, depth](const Eigen::MatrixXd& Xt,
                                                     const std::vector<int>& yt,
                                                     std::uint64_t s) {
        const RandomForest model = rf_train(Xt, yt, n_est, depth, s);
        return [model](const Eigen::Ref<const Eigen::VectorXd>& x) {
          return rf_predict(model, x);
        };
      });
    }
  return run_grid(points, X, y, n_classes, seed, eval);
}

std::vector<GridRow> grid_search_nn(const NnGrid& grid, const Eigen::MatrixXd& X,
                                    const std::vector<int>& y, int n_classes,
                                    std::uint64_t seed, const GridEval* eval) {
  std::vector<std::pair<std::string, Trainer>> points;
  for (Activation act : grid.activations)
    for (MlpSolver solver : grid.solvers)
      for (const std::vector<int>& hidden : grid.hidden) {
        std::ostringstream name;
        name << "nn activation=" << to_string(act) << " solver=" << to_string(solver)
             << " hidden=";
        for (std::size_t i = 0; i < hidden.size(); ++i)
          name << (i ? "x" : "") << hidden[i];
        points.emplace_back(
            name.str(), [act, solver, hidden, n_classes](const Eigen::MatrixXd& Xt,
                                                         const std::vector<int>& yt,
                                                         std::uint64_t s) {
              MlpOptions opts;
              opts.hidden = hidden;
              opts.activation = act;
              opts.solver = solver;
              const MlpModel model = mlp_train(Xt, yt, n_classes, opts, s);
              return [model](const Eigen::Ref<const Eigen::VectorXd>& x) {
                return model.predict(x);
              };
            });
      }
  return run_grid(points, X, y, n_classes, seed, eval);
}

std::vector<GridRow> grid_search_svm(const SvmGrid& grid, const Eigen::MatrixXd& X,
                                     const std::vector<int>& y, int n_classes,
                                     std::uint64_t seed, const GridEval* eval) {
  std::vector<std::pair<std::string, Trainer>> points;
  for (SvmKernel kernel : grid.kernels) {
    const std::vector<int> degrees =
        kernel == SvmKernel::Poly ? grid.degrees : std::vector<int>{3};
    for (int degree : degrees)
      for (GammaMode gm : grid.gamma_modes) {
        std::ostringstream name;
        name << "svm kernel=" << to_string(kernel);
        if (kernel == SvmKernel::Poly) name << " degree=" << degree;
        name << " gamma=" << to_string(gm);
        points.emplace_back(
            name.str(), [kernel, degree, gm, n_classes](const Eigen::MatrixXd& Xt,
                                                        const std::vector<int>& yt,
                                                        std::uint64_t s) {
              SvmOptions opts;
              opts.kernel = kernel;
              opts.degree = degree;
              opts.gamma_mode = gm;
              const SvmModel model = svm_train(Xt, yt, n_classes, opts, s);
              return [model](const Eigen::Ref<const Eigen::VectorXd>& x) {
                return model.predict(x);
              };
            });
      }
  }
  return run_grid(points, X, y, n_classes, seed, eval);
}

std::string format_grid_csv(const std::vector<GridRow>& rows) {
  std::ostringstream out;
  out << "params,f1_score,speedup,hw_cost_mtransistors,sph,top\n";
  char buf[128];
  for (const GridRow& r : rows) {
    std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%.6f,%.6f,%d\n", r.f1, r.speedup,
                  r.hw_cost_mtransistors, r.sph, r.top ? 1 : 0);
    out << r.params << buf;
  }
  return out.str();
}

} // namespace adaclk
