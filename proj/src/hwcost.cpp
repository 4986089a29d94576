#include "adaclk/hwcost.hpp"

#include <stdexcept>

namespace adaclk {

HwCost nn_cost(const std::vector<int>& layer_sizes, TransistorConstants tc) {
  if (layer_sizes.size() < 2)
    throw std::runtime_error("nn_cost: need at least one layer beyond the input");
  HwCost c;
  for (std::size_t l = 1; l < layer_sizes.size(); ++l) {
    const std::int64_t v = layer_sizes[l - 1]; // input size of layer l
    const std::int64_t m = layer_sizes[l];     // neurons of layer l
    c.n_mult += m * v;
    c.n_add += m * (v - 1);
  }
  c.transistors = c.n_mult * tc.per_multiplier + c.n_add * tc.per_adder;
  return c;
}

HwCost rf_cost(int n_estimators, int max_depth, TransistorConstants tc) {
  if (n_estimators < 1 || max_depth < 1)
    throw std::runtime_error("rf_cost: hyperparameters must be positive");
  int log2_ceil = 0;
  while ((1 << log2_ceil) < max_depth) ++log2_ceil;
  if (log2_ceil == 0) log2_ceil = 1; // a physical comparator count is at least 1
  HwCost c;
  c.n_comparators = static_cast<std::int64_t>(n_estimators) * log2_ceil;
  c.transistors = c.n_comparators * tc.per_comparator;
  return c;
}

HwCost svm_cost(const SvmModel& model, TransistorConstants tc) {
  HwCost c;
  const std::int64_t sv = model.n_support();
  const std::int64_t features = model.support_vectors.cols();
  c.n_mult = sv * features;
  c.n_add = sv * features;
  c.transistors = c.n_mult * tc.per_multiplier + c.n_add * tc.per_adder;
  return c;
}

double sph(double speedup, const HwCost& cost) {
  const double m = cost.transistors_millions();
  if (m <= 0.0) return 0.0;
  return speedup / m;
}

} // namespace adaclk
