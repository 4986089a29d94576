#pragma once

#include <cstdint>
#include <vector>

#include "adaclk/ml.hpp"

namespace adaclk {

/// Per-unit transistor counts. Declared engineering estimates,
/// configurable; only ratios matter for the SPH comparisons.
struct TransistorConstants {
  std::int64_t per_multiplier = 18000;
  std::int64_t per_adder = 900;
  std::int64_t per_comparator = 120;
};

struct HwCost {
  std::int64_t n_mult = 0;
  std::int64_t n_add = 0;
  std::int64_t n_comparators = 0;
  std::int64_t transistors = 0;

  double transistors_millions() const {
    return static_cast<double>(transistors) / 1e6;
  }
};

/// Multiplier/adder counts of a dense network: for each non-input layer
/// with m neurons and input size v, m*v multipliers and m*(v-1) adders.
HwCost nn_cost(const std::vector<int>& layer_sizes, TransistorConstants tc = {});

/// n_estimators * ceil(log2(max_depth)) comparators.
HwCost rf_cost(int n_estimators, int max_depth, TransistorConstants tc = {});

/// Configurable stub: (support vectors x features) multipliers and the
/// same number of adders. Not derived from the literature; reports flag it.
HwCost svm_cost(const SvmModel& model, TransistorConstants tc = {});

/// Speedup per hardware: speedup / transistors in millions.
double sph(double speedup, const HwCost& cost);

} // namespace adaclk
