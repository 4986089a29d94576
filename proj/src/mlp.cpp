#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

#include "adaclk/ml.hpp"
#include "adaclk/rng.hpp"

namespace adaclk {

const char* to_string(Activation a) {
  switch (a) {
    case Activation::Identity: return "identity";
    case Activation::Tanh: return "tanh";
    case Activation::Logistic: return "logistic";
    case Activation::Relu: return "relu";
  }
  return "?";
}

Activation activation_from_string(const std::string& s) {
  if (s == "identity") return Activation::Identity;
  if (s == "tanh") return Activation::Tanh;
  if (s == "logistic") return Activation::Logistic;
  if (s == "relu") return Activation::Relu;
  throw std::runtime_error("unknown activation: " + s);
}

const char* to_string(MlpSolver s) {
  switch (s) {
    case MlpSolver::Sgd: return "sgd";
    case MlpSolver::Lbfgs: return "lbfgs";
    case MlpSolver::Adam: return "adam";
  }
  return "?";
}

MlpSolver solver_from_string(const std::string& s) {
  if (s == "sgd") return MlpSolver::Sgd;
  if (s == "lbfgs") return MlpSolver::Lbfgs;
  if (s == "adam") return MlpSolver::Adam;
  throw std::runtime_error("unknown solver: " + s);
}

namespace {

double act(Activation a, double z) {
  switch (a) {
    case Activation::Identity: return z;
    case Activation::Tanh: return std::tanh(z);
    case Activation::Logistic: return 1.0 / (1.0 + std::exp(-z));
    case Activation::Relu: return z > 0.0 ? z : 0.0;
  }
  return z;
}

double act_deriv_from_output(Activation a, double out) {
  switch (a) {
    case Activation::Identity: return 1.0;
    case Activation::Tanh: return 1.0 - out * out;
    case Activation::Logistic: return out * (1.0 - out);
    case Activation::Relu: return out > 0.0 ? 1.0 : 0.0;
  }
  return 1.0;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& z) {
  const Eigen::VectorXd e = (z.array() - z.maxCoeff()).exp();
  return e / e.sum();
}

std::size_t param_count(const MlpModel& m) {
  std::size_t n = 0;
  for (std::size_t l = 0; l < m.weights.size(); ++l)
    n += static_cast<std::size_t>(m.weights[l].size() + m.biases[l].size());
  return n;
}

} // namespace

Eigen::VectorXd MlpModel::logits(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::VectorXd a = x;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    Eigen::VectorXd z = weights[l] * a + biases[l];
    if (l + 1 < weights.size())
      for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = act(activation, z(i));
    a = std::move(z);
  }
  return a;
}

int MlpModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const Eigen::VectorXd z = logits(x);
  int best = 0;
  for (Eigen::Index k = 1; k < z.size(); ++k)
    if (z(k) >= z(best)) best = static_cast<int>(k); // ties toward slower class
  return best;
}

double mlp_loss(const MlpModel& m, const Eigen::MatrixXd& X, const std::vector<int>& y) {
  double loss = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const Eigen::VectorXd p = softmax(m.logits(X.row(i).transpose()));
    loss += -std::log(std::max(p(y[static_cast<std::size_t>(i)]), 1e-300));
  }
  return loss / static_cast<double>(X.rows());
}

Eigen::VectorXd flatten_params(const MlpModel& m) {
  Eigen::VectorXd theta(static_cast<Eigen::Index>(param_count(m)));
  Eigen::Index p = 0;
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    for (Eigen::Index i = 0; i < m.weights[l].rows(); ++i)
      for (Eigen::Index j = 0; j < m.weights[l].cols(); ++j)
        theta(p++) = m.weights[l](i, j);
    for (Eigen::Index i = 0; i < m.biases[l].size(); ++i)
      theta(p++) = m.biases[l](i);
  }
  return theta;
}

void unflatten_params(MlpModel& m, const Eigen::Ref<const Eigen::VectorXd>& theta) {
  Eigen::Index p = 0;
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    for (Eigen::Index i = 0; i < m.weights[l].rows(); ++i)
      for (Eigen::Index j = 0; j < m.weights[l].cols(); ++j)
        m.weights[l](i, j) = theta(p++);
    for (Eigen::Index i = 0; i < m.biases[l].size(); ++i)
      m.biases[l](i) = theta(p++);
  }
}

namespace {

// Backprop over a subset of rows; returns mean-loss gradients per layer.
struct Grads {
  std::vector<Eigen::MatrixXd> dW;
  std::vector<Eigen::VectorXd> db;
  double loss = 0.0;
};

Grads backprop(const MlpModel& m, const Eigen::MatrixXd& X, const std::vector<int>& y,
               const std::vector<int>& rows) {
  const std::size_t L = m.weights.size();
  Grads g;
  g.dW.resize(L);
  g.db.resize(L);
  for (std::size_t l = 0; l < L; ++l) {
    g.dW[l] = Eigen::MatrixXd::Zero(m.weights[l].rows(), m.weights[l].cols());
    g.db[l] = Eigen::VectorXd::Zero(m.biases[l].size());
  }
  std::vector<Eigen::VectorXd> acts(L + 1);
  for (int r : rows) {
    acts[0] = X.row(r).transpose();
    for (std::size_t l = 0; l < L; ++l) {
      Eigen::VectorXd z = m.weights[l] * acts[l] + m.biases[l];
      if (l + 1 < L)
        for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = act(m.activation, z(i));
      acts[l + 1] = std::move(z);
    }
    const Eigen::VectorXd p = softmax(acts[L]);
    g.loss += -std::log(std::max(p(y[static_cast<std::size_t>(r)]), 1e-300));
    Eigen::VectorXd delta = p;
    delta(y[static_cast<std::size_t>(r)]) -= 1.0;
    for (std::size_t l = L; l-- > 0;) {
      g.dW[l] += delta * acts[l].transpose();
      g.db[l] += delta;
      if (l > 0) {
        Eigen::VectorXd prev = m.weights[l].transpose() * delta;
        for (Eigen::Index i = 0; i < prev.size(); ++i)
          prev(i) *= act_deriv_from_output(m.activation, acts[l](i));
        delta = std::move(prev);
      }
    }
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  for (std::size_t l = 0; l < L; ++l) {
    g.dW[l] *= inv;
    g.db[l] *= inv;
  }
  g.loss *= inv;
  return g;
}

Eigen::VectorXd flatten_grads(const Grads& g) {
  Eigen::Index total = 0;
  for (std::size_t l = 0; l < g.dW.size(); ++l)
    total += g.dW[l].size() + g.db[l].size();
  Eigen::VectorXd v(total);
  Eigen::Index p = 0;
  for (std::size_t l = 0; l < g.dW.size(); ++l) {
    for (Eigen::Index i = 0; i < g.dW[l].rows(); ++i)
      for (Eigen::Index j = 0; j < g.dW[l].cols(); ++j) v(p++) = g.dW[l](i, j);
    for (Eigen::Index i = 0; i < g.db[l].size(); ++i) v(p++) = g.db[l](i);
  }
  return v;
}

std::vector<int> all_rows(Eigen::Index n) {
  std::vector<int> r(static_cast<std::size_t>(n));
  std::iota(r.begin(), r.end(), 0);
  return r;
}

} // namespace

Eigen::VectorXd mlp_gradient(const MlpModel& m, const Eigen::MatrixXd& X,
                             const std::vector<int>& y) {
  return flatten_grads(backprop(m, X, y, all_rows(X.rows())));
}

MlpModel mlp_train(const Eigen::MatrixXd& X, const std::vector<int>& y,
                   int n_classes, const MlpOptions& opts, std::uint64_t seed) {
  if (X.rows() == 0) throw std::runtime_error("mlp_train: empty data");
  MlpModel m;
  m.activation = opts.activation;
  m.layer_sizes.push_back(static_cast<int>(X.cols()));
  for (int h : opts.hidden) m.layer_sizes.push_back(h);
  m.layer_sizes.push_back(n_classes);

  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < m.layer_sizes.size(); ++l) {
    const int fan_in = m.layer_sizes[l];
    const int fan_out = m.layer_sizes[l + 1];
    const double scale = std::sqrt(2.0 / static_cast<double>(fan_in));
    Eigen::MatrixXd W(fan_out, fan_in);
    for (Eigen::Index i = 0; i < W.rows(); ++i)
      for (Eigen::Index j = 0; j < W.cols(); ++j)
        W(i, j) = (rng.real() * 2.0 - 1.0) * scale;
    m.weights.push_back(std::move(W));
    m.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }

  const double initial_loss = mlp_loss(m, X, y);
  Eigen::VectorXd best_theta = flatten_params(m);
  double best_loss = initial_loss;
  auto track_best = [&]() {
    const double loss = mlp_loss(m, X, y);
    if (!std::isfinite(loss))
      throw std::runtime_error("mlp_train: non-finite loss; lower the learning rate");
    if (loss < best_loss) {
      best_loss = loss;
      best_theta = flatten_params(m);
    }
  };

  const Eigen::Index n = X.rows();
  if (opts.solver == MlpSolver::Sgd || opts.solver == MlpSolver::Adam) {
    const double lr = opts.solver == MlpSolver::Sgd
                          ? std::max(opts.learning_rate, 1e-2)
                          : opts.learning_rate;
    // Adam state over flattened parameters
    Eigen::VectorXd mom, vel;
    if (opts.solver == MlpSolver::Adam) {
      mom = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(param_count(m)));
      vel = mom;
    }
    std::vector<int> order = all_rows(n);
    long long step = 0;
    for (int epoch = 0; epoch < opts.epochs; ++epoch) {
      // Fisher-Yates shuffle with our deterministic rng
      for (std::size_t i = order.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.below(i));
        std::swap(order[i - 1], order[j]);
      }
      for (std::size_t start = 0; start < order.size();
           start += static_cast<std::size_t>(opts.batch_size)) {
        const std::size_t end =
            std::min(order.size(), start + static_cast<std::size_t>(opts.batch_size));
        const std::vector<int> batch(order.begin() + static_cast<std::ptrdiff_t>(start),
                                     order.begin() + static_cast<std::ptrdiff_t>(end));
        const Grads g = backprop(m, X, y, batch);
        if (opts.solver == MlpSolver::Sgd) {
          for (std::size_t l = 0; l < m.weights.size(); ++l) {
            m.weights[l] -= lr * g.dW[l];
            m.biases[l] -= lr * g.db[l];
          }
        } else {
          ++step;
          const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
          const Eigen::VectorXd grad = flatten_grads(g);
          mom = b1 * mom + (1.0 - b1) * grad;
          vel = b2 * vel + (1.0 - b2) * grad.cwiseProduct(grad);
          const double bc1 = 1.0 - std::pow(b1, static_cast<double>(step));
          const double bc2 = 1.0 - std::pow(b2, static_cast<double>(step));
          Eigen::VectorXd theta = flatten_params(m);
          theta -= (lr / bc1) * mom.cwiseQuotient(
                       ((vel / bc2).cwiseSqrt().array() + eps).matrix());
          unflatten_params(m, theta);
        }
      }
      track_best();
    }
  } else {
    // limited-memory quasi-Newton with two-loop recursion and Armijo
    // backtracking, full batch
    const int hist = 10;
    std::deque<Eigen::VectorXd> s_hist, y_hist;
    std::deque<double> rho_hist;
    Eigen::VectorXd theta = flatten_params(m);
    Grads g = backprop(m, X, y, all_rows(n));
    Eigen::VectorXd grad = flatten_grads(g);
    double loss = g.loss;
    for (int it = 0; it < opts.epochs; ++it) {
      // two-loop recursion
      Eigen::VectorXd q = grad;
      std::vector<double> alpha(s_hist.size());
      for (std::size_t i = s_hist.size(); i-- > 0;) {
        alpha[i] = rho_hist[i] * s_hist[i].dot(q);
        q -= alpha[i] * y_hist[i];
      }
      if (!s_hist.empty()) {
        const double gamma = s_hist.back().dot(y_hist.back()) /
                             y_hist.back().squaredNorm();
        q *= gamma;
      }
      for (std::size_t i = 0; i < s_hist.size(); ++i) {
        const double beta = rho_hist[i] * y_hist[i].dot(q);
        q += (alpha[i] - beta) * s_hist[i];
      }
      Eigen::VectorXd dir = -q;
      double slope = grad.dot(dir);
      if (slope >= 0.0) { // not a descent direction; fall back to steepest
        dir = -grad;
        slope = grad.dot(dir);
      }
      double step = 1.0;
      const double c1 = 1e-4;
      double new_loss = loss;
      Eigen::VectorXd new_theta;
      bool accepted = false;
      for (int bt = 0; bt < 30; ++bt) {
        new_theta = theta + step * dir;
        unflatten_params(m, new_theta);
        new_loss = mlp_loss(m, X, y);
        if (std::isfinite(new_loss) && new_loss <= loss + c1 * step * slope) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        unflatten_params(m, theta);
        break; // converged / no progress
      }
      Grads ng = backprop(m, X, y, all_rows(n));
      Eigen::VectorXd new_grad = flatten_grads(ng);
      const Eigen::VectorXd s = new_theta - theta;
      const Eigen::VectorXd yv = new_grad - grad;
      const double sy = s.dot(yv);
      if (sy > 1e-12) {
        s_hist.push_back(s);
        y_hist.push_back(yv);
        rho_hist.push_back(1.0 / sy);
        if (static_cast<int>(s_hist.size()) > hist) {
          s_hist.pop_front();
          y_hist.pop_front();
          rho_hist.pop_front();
        }
      }
      theta = std::move(new_theta);
      grad = std::move(new_grad);
      loss = new_loss;
      if (grad.norm() < 1e-8) break;
    }
    track_best();
  }

  unflatten_params(m, best_theta);
  return m;
}

} // namespace adaclk
