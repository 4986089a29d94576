#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "adaclk/isa.hpp"
#include "adaclk/oracle.hpp"

namespace adaclk {

constexpr int kNumFeatures = 9; // 4 one-hot type bits + 5 scalars

/// Feature layout: [type0..type3, op1, op2, xop1, xop2, prev_output].
using FeatureVector = Eigen::Matrix<double, kNumFeatures, 1>;

struct DelayClassConfig {
  int n_classes = 2;
  std::vector<double> boundaries; // n_classes-1 fractions of t_wc, ascending
  std::int64_t t_wc_ps = 0;

  /// Upper edge of class k in picoseconds; last period equals t_wc.
  double class_period_ps(int k) const;
  std::vector<double> class_periods() const;
};

/// Boundary fractions 2-class {0.55}, 3-class {0.45, 0.65},
/// 4-class {0.25, 0.50, 0.75}.
DelayClassConfig default_class_config(int n_classes, std::int64_t t_wc_ps);

void validate(const DelayClassConfig& cfg);

/// Arith->1000, ArithImm->0100, Logical->0010, MulDiv->0001.
std::array<int, 4> one_hot(OpKind kind);

/// Raw features: scalars are the unsigned 32-bit words as reals;
/// xop1/xop2 are the operands XORed with their previous values.
FeatureVector extract(const ProfileRecord& r);

/// Half-open bucketing with inclusive upper edges; class 0 closed at 0.
int class_of_delay(std::int64_t delay_ps, const DelayClassConfig& cfg);

/// Maps each scalar feature through its empirical CDF and the inverse
/// standard-normal CDF; the one-hot prefix passes through unchanged.
class QuantileTransformer {
public:
  static constexpr double kClipEps = 1e-7;

  /// X: one row per record, kNumFeatures columns.
  static QuantileTransformer fit(const Eigen::MatrixXd& X, int n_quantiles = 1000);

  FeatureVector transform(const FeatureVector& fv) const;
  Eigen::MatrixXd transform(const Eigen::MatrixXd& X) const;

  bool fitted() const { return !refs_.empty(); }
  int n_quantiles() const { return n_quantiles_; }

  std::string serialize() const;
  static QuantileTransformer deserialize(const std::string& text,
                                         const std::string& origin = "<string>");
  void save(const std::string& path) const;
  static QuantileTransformer load(const std::string& path);

private:
  double transform_scalar(int scalar_idx, double x) const;

  int n_quantiles_ = 0;
  // one sorted reference vector per scalar feature (columns 4..8)
  std::vector<std::vector<double>> refs_;
};

/// Inverse standard-normal CDF (rational approximation, ~1e-9 relative).
double norm_ppf(double p);
/// Standard-normal CDF.
double norm_cdf(double x);

struct LabeledDataset {
  std::vector<ProfileRecord> records;
  std::vector<int> labels;

  std::size_t size() const { return records.size(); }
};

/// Raw design matrix, one row per record.
Eigen::MatrixXd to_matrix(const std::vector<ProfileRecord>& records);

// Dataset file: profile CSV plus a trailing `label` column.
std::string format_dataset_csv(const LabeledDataset& ds);
LabeledDataset parse_dataset_csv(const std::string& text,
                                 const std::string& origin = "<string>");
void write_dataset_file(const LabeledDataset& ds, const std::string& path);
LabeledDataset parse_dataset_file(const std::string& path);

} // namespace adaclk
