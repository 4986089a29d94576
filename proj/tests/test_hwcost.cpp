#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "adaclk/hwcost.hpp"
#include "adaclk/rng.hpp"

using namespace adaclk;

namespace {

// independent direct-sum reference for the dense-layer counts
std::pair<std::int64_t, std::int64_t> nn_counts_reference(const std::vector<int>& sizes) {
  std::int64_t mult = 0, add = 0;
  for (std::size_t l = 1; l < sizes.size(); ++l) {
    mult += static_cast<std::int64_t>(sizes[l]) * sizes[l - 1];
    add += static_cast<std::int64_t>(sizes[l]) * (sizes[l - 1] - 1);
  }
  return {mult, add};
}

int ceil_log2(int x) {
  int r = 0;
  while ((1 << r) < x) ++r;
  return r < 1 ? 1 : r;
}

} // namespace

TEST_CASE("nn_cost worked examples") {
  const HwCost a = nn_cost({9, 20, 10, 4});
  CHECK(a.n_mult == 420);
  CHECK(a.n_add == 386);

  const HwCost single = nn_cost({9, 1});
  CHECK(single.n_mult == 9);
  CHECK(single.n_add == 8);

  const HwCost direct = nn_cost({9, 2});
  CHECK(direct.n_mult == 18);
  CHECK(direct.n_add == 16);

  CHECK_THROWS(nn_cost({9}));
}

TEST_CASE("nn_cost matches the direct-sum reference on random layer lists") {
  Rng rng(101);
  for (int t = 0; t < 20; ++t) {
    std::vector<int> sizes{9};
    const int layers = 1 + static_cast<int>(rng.below(4));
    for (int l = 0; l < layers; ++l)
      sizes.push_back(1 + static_cast<int>(rng.below(40)));
    const auto [mult, add] = nn_counts_reference(sizes);
    const HwCost c = nn_cost(sizes);
    CHECK(c.n_mult == mult);
    CHECK(c.n_add == add);
    TransistorConstants tc;
    CHECK(c.transistors == mult * tc.per_multiplier + add * tc.per_adder);
  }
}

TEST_CASE("rf_cost worked examples") {
  CHECK(rf_cost(100, 40).n_comparators == 600);
  CHECK(rf_cost(1, 2).n_comparators == 1);
  CHECK(rf_cost(50, 20).n_comparators == 2 * rf_cost(25, 20).n_comparators);
  CHECK_THROWS(rf_cost(0, 10));
}

TEST_CASE("rf_cost over the full grid") {
  for (int n_est : {1, 10, 50, 100, 200})
    for (int depth : {10, 20, 30, 40, 50}) {
      const HwCost c = rf_cost(n_est, depth);
      CHECK(c.n_comparators == static_cast<std::int64_t>(n_est) * ceil_log2(depth));
      TransistorConstants tc;
      CHECK(c.transistors == c.n_comparators * tc.per_comparator);
    }
}

TEST_CASE("svm stub cost") {
  SvmModel empty;
  empty.support_vectors.resize(0, 9);
  CHECK(svm_cost(empty).transistors == 0);

  SvmModel m;
  m.support_vectors = Eigen::MatrixXd::Zero(100, 9);
  const HwCost c = svm_cost(m);
  CHECK(c.n_mult == 900);
  CHECK(c.n_add == 900);

  SvmModel bigger;
  bigger.support_vectors = Eigen::MatrixXd::Zero(101, 9);
  CHECK(svm_cost(bigger).transistors > c.transistors);
}

TEST_CASE("sph is the plain ratio") {
  HwCost c;
  c.transistors = 461000;
  CHECK(sph(1.685, c) == doctest::Approx(1.685 / 0.461));
  CHECK(sph(0.0, c) == 0.0);
  HwCost half = c;
  half.transistors = c.transistors / 2;
  CHECK(sph(1.685, half) == doctest::Approx(2.0 * sph(1.685, c)));
  HwCost zero;
  CHECK(sph(1.0, zero) == 0.0);
}
