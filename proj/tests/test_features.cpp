#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "adaclk/features.hpp"
#include "adaclk/rng.hpp"

using namespace adaclk;

TEST_CASE("one-hot codes") {
  CHECK(one_hot(OpKind::Arith) == std::array<int, 4>{1, 0, 0, 0});
  CHECK(one_hot(OpKind::ArithImm) == std::array<int, 4>{0, 1, 0, 0});
  CHECK(one_hot(OpKind::Logical) == std::array<int, 4>{0, 0, 1, 0});
  CHECK(one_hot(OpKind::MulDiv) == std::array<int, 4>{0, 0, 0, 1});
}

TEST_CASE("feature extraction") {
  ProfileRecord r;
  r.instr.kind = OpKind::Logical;
  r.instr.subop = SubOp::Xor;
  r.instr.op1 = 0xFFFF0000u;
  r.instr.op2 = 0x12345678u;
  r.prev_op1 = 0x0000FFFFu;
  r.prev_op2 = 0x12345678u;
  r.prev_output = 42;
  const FeatureVector fv = extract(r);
  REQUIRE(fv.size() == kNumFeatures);
  CHECK(fv(0) == 0);
  CHECK(fv(2) == 1);
  CHECK(fv(4) == doctest::Approx(static_cast<double>(0xFFFF0000u)));
  CHECK(fv(6) == doctest::Approx(static_cast<double>(0xFFFFFFFFu))); // xop1
  CHECK(fv(7) == 0); // op2 unchanged
  CHECK(fv(8) == 42);
}

TEST_CASE("class boundaries and periods") {
  const std::int64_t t_wc = 4000;
  const DelayClassConfig c2 = default_class_config(2, t_wc);
  const DelayClassConfig c3 = default_class_config(3, t_wc);
  const DelayClassConfig c4 = default_class_config(4, t_wc);
  CHECK(c2.boundaries == std::vector<double>{0.55});
  CHECK(c3.boundaries == std::vector<double>{0.45, 0.65});
  CHECK(c4.boundaries == std::vector<double>{0.25, 0.50, 0.75});
  CHECK(c2.class_period_ps(0) == doctest::Approx(2200.0));
  CHECK(c2.class_period_ps(1) == doctest::Approx(4000.0));

  CHECK(class_of_delay(0, c2) == 0);
  CHECK(class_of_delay(2200, c2) == 0); // boundary is inclusive
  CHECK(class_of_delay(2201, c2) == 1);
  CHECK(class_of_delay(4000, c2) == 1);
  CHECK(class_of_delay(1800, c3) == 0);
  CHECK(class_of_delay(1801, c3) == 1);
  CHECK(class_of_delay(2600, c3) == 1);
  CHECK(class_of_delay(2601, c3) == 2);
  CHECK(class_of_delay(1000, c4) == 0);
  CHECK(class_of_delay(2000, c4) == 1);
  CHECK(class_of_delay(3000, c4) == 2);
  CHECK(class_of_delay(3001, c4) == 3);
  CHECK_THROWS(class_of_delay(4001, c2));
}

TEST_CASE("invalid class configs rejected") {
  DelayClassConfig cfg;
  cfg.n_classes = 3;
  cfg.boundaries = {0.65, 0.45}; // not ascending
  cfg.t_wc_ps = 100;
  CHECK_THROWS(validate(cfg));
  cfg.boundaries = {0.45};
  CHECK_THROWS(validate(cfg)); // wrong count
}

namespace {

Eigen::MatrixXd uniform_design(int n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd X(n, kNumFeatures);
  for (int i = 0; i < n; ++i) {
    X.row(i).setZero();
    X(i, 0) = 1;
    for (int j = 4; j < kNumFeatures; ++j) X(i, j) = rng.real() * 4e9;
  }
  return X;
}

} // namespace

TEST_CASE("quantile transform maps the median near zero") {
  const Eigen::MatrixXd X = uniform_design(2001, 3);
  const QuantileTransformer qt = QuantileTransformer::fit(X);
  std::vector<double> col(2001);
  for (int i = 0; i < 2001; ++i) col[static_cast<std::size_t>(i)] = X(i, 4);
  std::nth_element(col.begin(), col.begin() + 1000, col.end());
  FeatureVector fv = FeatureVector::Zero();
  fv(0) = 1;
  fv(4) = col[1000];
  CHECK(std::abs(qt.transform(fv)(4)) < 0.01);
  CHECK(qt.transform(fv)(0) == 1); // one-hot passes through
}

TEST_CASE("constant feature column transforms to a constant") {
  Eigen::MatrixXd X = uniform_design(100, 5);
  X.col(8).setConstant(7.0);
  const QuantileTransformer qt = QuantileTransformer::fit(X);
  FeatureVector a = FeatureVector::Zero(), b = FeatureVector::Zero();
  a(8) = 7.0;
  b(8) = 123.0;
  CHECK(qt.transform(a)(8) == qt.transform(b)(8));
}

TEST_CASE("transformed uniform marginal is close to standard normal") {
  const int n = 9000;
  const Eigen::MatrixXd X = uniform_design(n, 8);
  const QuantileTransformer qt = QuantileTransformer::fit(X);
  const Eigen::MatrixXd T = qt.transform(X);
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = T(i, 4);
  std::sort(v.begin(), v.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = norm_cdf(v[static_cast<std::size_t>(i)]);
    ks = std::max(ks, std::abs(f - (i + 1.0) / n));
    ks = std::max(ks, std::abs(f - static_cast<double>(i) / n));
  }
  CHECK(ks < 0.05);
}

TEST_CASE("transform is monotone per feature") {
  const Eigen::MatrixXd X = uniform_design(1000, 13);
  const QuantileTransformer qt = QuantileTransformer::fit(X);
  Rng rng(14);
  for (int t = 0; t < 10000; ++t) {
    FeatureVector a = FeatureVector::Zero(), b = FeatureVector::Zero();
    const int j = 4 + static_cast<int>(rng.below(5));
    double x = rng.real() * 5e9 - 5e8;
    double y = rng.real() * 5e9 - 5e8;
    if (x > y) std::swap(x, y);
    a(j) = x;
    b(j) = y;
    CHECK(qt.transform(a)(j) <= qt.transform(b)(j));
  }
}

TEST_CASE("norm_ppf inverts norm_cdf") {
  for (double p : {0.001, 0.1, 0.25, 0.5, 0.9, 0.999}) {
    CHECK(norm_cdf(norm_ppf(p)) == doctest::Approx(p).epsilon(1e-6));
  }
  CHECK(norm_ppf(0.5) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("transformer serialization round trip") {
  const Eigen::MatrixXd X = uniform_design(500, 77);
  const QuantileTransformer qt = QuantileTransformer::fit(X);
  const QuantileTransformer back = QuantileTransformer::deserialize(qt.serialize());
  Rng rng(9);
  for (int t = 0; t < 100; ++t) {
    FeatureVector fv = FeatureVector::Zero();
    fv(1) = 1;
    for (int j = 4; j < kNumFeatures; ++j) fv(j) = rng.real() * 4e9;
    CHECK(qt.transform(fv) == back.transform(fv));
  }
  CHECK_THROWS(QuantileTransformer::deserialize("bogus v9"));
}

TEST_CASE("dataset csv round trip") {
  LabeledDataset ds;
  for (int i = 0; i < 10; ++i) {
    ProfileRecord r;
    r.instr.kind = i % 2 ? OpKind::Arith : OpKind::MulDiv;
    r.instr.subop = i % 2 ? SubOp::Add : SubOp::Mul;
    r.instr.op1 = static_cast<std::uint32_t>(i * 12345);
    r.instr.op2 = static_cast<std::uint32_t>(i);
    r.prev_output = static_cast<std::uint32_t>(i * 7);
    r.delay_ps = 10 + i;
    ds.records.push_back(r);
    ds.labels.push_back(i % 2);
  }
  const LabeledDataset back = parse_dataset_csv(format_dataset_csv(ds), "mem");
  REQUIRE(back.size() == ds.size());
  CHECK(back.labels == ds.labels);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(back.records[i].instr == ds.records[i].instr);
    CHECK(back.records[i].delay_ps == ds.records[i].delay_ps);
  }
}
