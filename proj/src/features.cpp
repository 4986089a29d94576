#include "adaclk/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace adaclk {

double DelayClassConfig::class_period_ps(int k) const {
  if (k < 0 || k >= n_classes) throw std::runtime_error("class index out of range");
  if (k == n_classes - 1) return static_cast<double>(t_wc_ps);
  return boundaries[static_cast<std::size_t>(k)] * static_cast<double>(t_wc_ps);
}

std::vector<double> DelayClassConfig::class_periods() const {
  std::vector<double> p;
  p.reserve(static_cast<std::size_t>(n_classes));
  for (int k = 0; k < n_classes; ++k) p.push_back(class_period_ps(k));
  return p;
}

DelayClassConfig default_class_config(int n_classes, std::int64_t t_wc_ps) {
  DelayClassConfig cfg;
  cfg.n_classes = n_classes;
  cfg.t_wc_ps = t_wc_ps;
  switch (n_classes) {
    case 2: cfg.boundaries = {0.55}; break;
    case 3: cfg.boundaries = {0.45, 0.65}; break;
    case 4: cfg.boundaries = {0.25, 0.50, 0.75}; break;
    default: throw std::runtime_error("n_classes must be 2, 3 or 4");
  }
  validate(cfg);
  return cfg;
}

void validate(const DelayClassConfig& cfg) {
  if (cfg.n_classes < 2 || cfg.n_classes > 4)
    throw std::runtime_error("n_classes must be 2, 3 or 4");
  if (static_cast<int>(cfg.boundaries.size()) != cfg.n_classes - 1)
    throw std::runtime_error("need n_classes-1 boundaries");
  double prev = 0.0;
  for (double b : cfg.boundaries) {
    if (b <= prev || b >= 1.0)
      throw std::runtime_error("boundaries must be strictly ascending in (0,1)");
    prev = b;
  }
  if (cfg.t_wc_ps <= 0) throw std::runtime_error("t_wc must be positive");
}

std::array<int, 4> one_hot(OpKind kind) {
  std::array<int, 4> code{0, 0, 0, 0};
  code[static_cast<std::size_t>(static_cast<int>(kind))] = 1;
  return code;
}

FeatureVector extract(const ProfileRecord& r) {
  FeatureVector fv;
  const std::array<int, 4> oh = one_hot(r.instr.kind);
  for (int i = 0; i < 4; ++i) fv(i) = oh[static_cast<std::size_t>(i)];
  fv(4) = static_cast<double>(r.instr.op1);
  fv(5) = static_cast<double>(r.instr.op2);
  fv(6) = static_cast<double>(r.instr.op1 ^ r.prev_op1);
  fv(7) = static_cast<double>(r.instr.op2 ^ r.prev_op2);
  fv(8) = static_cast<double>(r.prev_output);
  return fv;
}

int class_of_delay(std::int64_t delay_ps, const DelayClassConfig& cfg) {
  if (delay_ps < 0) throw std::runtime_error("negative delay");
  if (delay_ps > cfg.t_wc_ps)
    throw std::runtime_error("delay " + std::to_string(delay_ps) +
                             " ps exceeds t_wc " + std::to_string(cfg.t_wc_ps) + " ps");
  const double d = static_cast<double>(delay_ps);
  for (int k = 0; k + 1 < cfg.n_classes; ++k) {
    // inclusive upper edge
    if (d <= cfg.boundaries[static_cast<std::size_t>(k)] *
                 static_cast<double>(cfg.t_wc_ps) + 1e-9)
      return k;
  }
  return cfg.n_classes - 1;
}

// Acklam's rational approximation to the inverse normal CDF.
double norm_ppf(double p) {
  if (p <= 0.0 || p >= 1.0)
    throw std::runtime_error("norm_ppf: p must be in (0,1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double q, r, x;
  if (p < plow) {
    q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    q = p - 0.5;
    r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  return x;
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

QuantileTransformer QuantileTransformer::fit(const Eigen::MatrixXd& X, int n_quantiles) {
  if (X.rows() < 1) throw std::runtime_error("fit_quantile: empty dataset");
  if (X.cols() != kNumFeatures)
    throw std::runtime_error("fit_quantile: expected 9 feature columns");
  QuantileTransformer qt;
  qt.n_quantiles_ = std::max(2, std::min<int>(n_quantiles, static_cast<int>(X.rows())));
  qt.refs_.resize(5);
  const Eigen::Index n = X.rows();
  std::vector<double> col(static_cast<std::size_t>(n));
  for (int f = 0; f < 5; ++f) {
    for (Eigen::Index i = 0; i < n; ++i)
      col[static_cast<std::size_t>(i)] = X(i, 4 + f);
    std::sort(col.begin(), col.end());
    std::vector<double>& refs = qt.refs_[static_cast<std::size_t>(f)];
    refs.resize(static_cast<std::size_t>(qt.n_quantiles_));
    for (int q = 0; q < qt.n_quantiles_; ++q) {
      // linear-interpolated empirical quantile at p = q/(nq-1)
      const double pos = static_cast<double>(q) /
                         static_cast<double>(qt.n_quantiles_ - 1) *
                         static_cast<double>(n - 1);
      const Eigen::Index lo = static_cast<Eigen::Index>(std::floor(pos));
      const Eigen::Index hi = std::min(lo + 1, n - 1);
      const double frac = pos - static_cast<double>(lo);
      refs[static_cast<std::size_t>(q)] =
          col[static_cast<std::size_t>(lo)] * (1.0 - frac) +
          col[static_cast<std::size_t>(hi)] * frac;
    }
  }
  return qt;
}

double QuantileTransformer::transform_scalar(int scalar_idx, double x) const {
  const std::vector<double>& refs = refs_[static_cast<std::size_t>(scalar_idx)];
  const double lo = refs.front();
  const double hi = refs.back();
  double p;
  if (hi <= lo) {
    p = 0.5; // degenerate (constant) feature
  } else if (x <= lo) {
    p = 0.0;
  } else if (x >= hi) {
    p = 1.0;
  } else {
    const auto it = std::upper_bound(refs.begin(), refs.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - refs.begin()); // refs[j-1] <= x < refs[j]
    const double r0 = refs[j - 1];
    const double r1 = refs[j];
    const double frac = r1 > r0 ? (x - r0) / (r1 - r0) : 0.0;
    p = (static_cast<double>(j - 1) + frac) / static_cast<double>(n_quantiles_ - 1);
  }
  p = std::min(1.0 - kClipEps, std::max(kClipEps, p));
  return norm_ppf(p);
}

FeatureVector QuantileTransformer::transform(const FeatureVector& fv) const {
  if (!fitted()) throw std::runtime_error("transform before fit");
  FeatureVector out = fv;
  for (int f = 0; f < 5; ++f) out(4 + f) = transform_scalar(f, fv(4 + f));
  return out;
}

Eigen::MatrixXd QuantileTransformer::transform(const Eigen::MatrixXd& X) const {
  if (!fitted()) throw std::runtime_error("transform before fit");
  Eigen::MatrixXd out = X;
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (int f = 0; f < 5; ++f) out(i, 4 + f) = transform_scalar(f, X(i, 4 + f));
  return out;
}

std::string QuantileTransformer::serialize() const {
  std::ostringstream out;
  out << "qtfmt v1 n_quantiles=" << n_quantiles_ << "\n";
  char buf[32];
  for (std::size_t f = 0; f < refs_.size(); ++f) {
    out << "feature " << f;
    for (double v : refs_[f]) {
      std::snprintf(buf, sizeof buf, " %.17g", v);
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

QuantileTransformer QuantileTransformer::deserialize(const std::string& text,
                                                     const std::string& origin) {
  std::istringstream in(text);
  std::string header;
  if (!std::getline(in, header) || header.rfind("qtfmt v1 n_quantiles=", 0) != 0)
    throw std::runtime_error(origin + ": bad qtfmt header");
  QuantileTransformer qt;
  qt.n_quantiles_ = std::stoi(header.substr(header.find('=') + 1));
  qt.refs_.resize(5);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string word;
    int f;
    if (!(ls >> word >> f) || word != "feature" || f < 0 || f >= 5)
      throw std::runtime_error(origin + ": bad feature line");
    std::vector<double>& refs = qt.refs_[static_cast<std::size_t>(f)];
    double v;
    while (ls >> v) refs.push_back(v);
    if (static_cast<int>(refs.size()) != qt.n_quantiles_)
      throw std::runtime_error(origin + ": quantile count mismatch");
  }
  for (const auto& refs : qt.refs_)
    if (refs.empty()) throw std::runtime_error(origin + ": missing feature block");
  return qt;
}

void QuantileTransformer::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << serialize();
}

QuantileTransformer QuantileTransformer::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str(), path);
}

Eigen::MatrixXd to_matrix(const std::vector<ProfileRecord>& records) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(records.size()), kNumFeatures);
  for (std::size_t i = 0; i < records.size(); ++i)
    X.row(static_cast<Eigen::Index>(i)) = extract(records[i]).transpose();
  return X;
}

std::string format_dataset_csv(const LabeledDataset& ds) {
  if (ds.records.size() != ds.labels.size())
    throw std::runtime_error("dataset records/labels size mismatch");
  std::ostringstream out;
  out << "kind,subop,op1,op2,prev_op1,prev_op2,prev_output,delay_ps,label\n";
  char buf[160];
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const ProfileRecord& r = ds.records[i];
    std::snprintf(buf, sizeof buf, "%s,%s,%08X,%08X,%08X,%08X,%08X,%lld,%d\n",
                  to_string(r.instr.kind), to_string(r.instr.subop), r.instr.op1,
                  r.instr.op2, r.prev_op1, r.prev_op2, r.prev_output,
                  static_cast<long long>(r.delay_ps), ds.labels[i]);
    out << buf;
  }
  return out.str();
}

LabeledDataset parse_dataset_csv(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool saw_header = false;
  LabeledDataset ds;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const std::string ctx = origin + ":" + std::to_string(lineno);
    if (!saw_header) {
      if (line.rfind("kind,subop,", 0) != 0 || line.find(",label") == std::string::npos)
        throw std::runtime_error(ctx + ": bad dataset CSV header");
      saw_header = true;
      continue;
    }
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) throw std::runtime_error(ctx + ": missing label");
    const int label = std::stoi(line.substr(comma + 1));
    const std::string profile_part = line.substr(0, comma);
    const std::string one = "kind,subop,op1,op2,prev_op1,prev_op2,prev_output,delay_ps\n" +
                            profile_part + "\n";
    const std::vector<ProfileRecord> rec = parse_profile_csv(one, ctx);
    if (rec.size() != 1) throw std::runtime_error(ctx + ": bad record");
    ds.records.push_back(rec.front());
    ds.labels.push_back(label);
  }
  if (!saw_header) throw std::runtime_error(origin + ": missing dataset CSV header");
  return ds;
}

void write_dataset_file(const LabeledDataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << format_dataset_csv(ds);
}

LabeledDataset parse_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_dataset_csv(ss.str(), path);
}

} // namespace adaclk
