#include <cmath>
#include <stdexcept>

#include "adaclk/ml.hpp"
#include "adaclk/rng.hpp"

namespace adaclk {

const char* to_string(SvmKernel k) {
  switch (k) {
    case SvmKernel::Linear: return "linear";
    case SvmKernel::Poly: return "poly";
    case SvmKernel::Rbf: return "rbf";
  }
  return "?";
}

SvmKernel svm_kernel_from_string(const std::string& s) {
  if (s == "linear") return SvmKernel::Linear;
  if (s == "poly") return SvmKernel::Poly;
  if (s == "rbf") return SvmKernel::Rbf;
  throw std::runtime_error("unknown SVM kernel: " + s);
}

const char* to_string(GammaMode g) {
  return g == GammaMode::Scale ? "scale" : "auto";
}

GammaMode gamma_mode_from_string(const std::string& s) {
  if (s == "scale") return GammaMode::Scale;
  if (s == "auto") return GammaMode::Auto;
  throw std::runtime_error("unknown gamma mode: " + s);
}

double svm_gamma(GammaMode mode, const Eigen::MatrixXd& X) {
  const double n_features = static_cast<double>(X.cols());
  if (mode == GammaMode::Auto) return 1.0 / n_features;
  const double mean = X.mean();
  const double var = (X.array() - mean).square().mean();
  if (var <= 0.0) return 1.0 / n_features;
  return 1.0 / (n_features * var);
}

namespace {

double kernel_eval(SvmKernel k, int degree, double gamma,
                   const Eigen::Ref<const Eigen::VectorXd>& a,
                   const Eigen::Ref<const Eigen::VectorXd>& b) {
  switch (k) {
    case SvmKernel::Linear: return a.dot(b);
    case SvmKernel::Poly: return std::pow(gamma * a.dot(b), degree);
    case SvmKernel::Rbf: return std::exp(-gamma * (a - b).squaredNorm());
  }
  return 0.0;
}

} // namespace

Eigen::VectorXd SvmModel::decision(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(alpha.cols());
  for (Eigen::Index j = 0; j < support_vectors.rows(); ++j) {
    const double k = kernel_eval(kernel, degree, gamma,
                                 support_vectors.row(j).transpose(), x);
    d += k * alpha.row(j).transpose();
  }
  return d * scale;
}

int SvmModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const Eigen::VectorXd d = decision(x);
  int best = 0;
  for (Eigen::Index k = 1; k < d.size(); ++k)
    if (d(k) >= d(best)) best = static_cast<int>(k);
  return best;
}

SvmModel svm_train(const Eigen::MatrixXd& X, const std::vector<int>& y,
                   int n_classes, const SvmOptions& opts, std::uint64_t seed) {
  const Eigen::Index n = X.rows();
  if (n == 0) throw std::runtime_error("svm_train: empty data");
  if (opts.kernel == SvmKernel::Poly && (opts.degree < 2 || opts.degree > 15))
    throw std::runtime_error("svm_train: poly degree must be in [2,15]");
  {
    std::vector<char> seen(static_cast<std::size_t>(n_classes), 0);
    int distinct = 0;
    for (int lbl : y)
      if (!seen[static_cast<std::size_t>(lbl)]) {
        seen[static_cast<std::size_t>(lbl)] = 1;
        ++distinct;
      }
    if (distinct < 2) throw std::runtime_error("svm_train: single-class data");
  }

  const double gamma = svm_gamma(opts.gamma_mode, X);

  // Precomputed Gram for moderate n; per-step kernel evaluation otherwise.
  const bool use_gram = n <= 4000;
  Eigen::MatrixXf gram;
  if (use_gram) {
    gram.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j <= i; ++j) {
        const float k = static_cast<float>(kernel_eval(
            opts.kernel, opts.degree, gamma, X.row(i).transpose(), X.row(j).transpose()));
        gram(i, j) = k;
        gram(j, i) = k;
      }
  }

  const long long T = static_cast<long long>(opts.epochs) * n;
  // Pegasos alpha counts, one binary problem per class (one-vs-rest)
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(n, n_classes);
  for (int c = 0; c < n_classes; ++c) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
    for (long long t = 1; t <= T; ++t) {
      const Eigen::Index i =
          static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
      const double yi = y[static_cast<std::size_t>(i)] == c ? 1.0 : -1.0;
      double f = 0.0;
      if (use_gram) {
        for (Eigen::Index j = 0; j < n; ++j) {
          const double a = counts(j, c);
          if (a != 0.0) {
            const double yj = y[static_cast<std::size_t>(j)] == c ? 1.0 : -1.0;
            f += a * yj * static_cast<double>(gram(j, i));
          }
        }
      } else {
        for (Eigen::Index j = 0; j < n; ++j) {
          const double a = counts(j, c);
          if (a != 0.0) {
            const double yj = y[static_cast<std::size_t>(j)] == c ? 1.0 : -1.0;
            f += a * yj * kernel_eval(opts.kernel, opts.degree, gamma,
                                      X.row(j).transpose(), X.row(i).transpose());
          }
        }
      }
      f /= opts.lambda * static_cast<double>(t);
      if (yi * f < 1.0) counts(i, c) += 1.0;
    }
  }

  // keep only rows that support at least one class
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < n; ++i)
    if (counts.row(i).cwiseAbs().sum() > 0.0) support.push_back(i);

  SvmModel model;
  model.kernel = opts.kernel;
  model.degree = opts.degree;
  model.gamma = gamma;
  model.scale = 1.0 / (opts.lambda * static_cast<double>(T));
  model.support_vectors.resize(static_cast<Eigen::Index>(support.size()), X.cols());
  model.alpha.resize(static_cast<Eigen::Index>(support.size()), n_classes);
  for (std::size_t s = 0; s < support.size(); ++s) {
    const Eigen::Index i = support[s];
    model.support_vectors.row(static_cast<Eigen::Index>(s)) = X.row(i);
    for (int c = 0; c < n_classes; ++c) {
      const double yc = y[static_cast<std::size_t>(i)] == c ? 1.0 : -1.0;
      model.alpha(static_cast<Eigen::Index>(s), c) = counts(i, c) * yc;
    }
  }
  return model;
}

} // namespace adaclk
