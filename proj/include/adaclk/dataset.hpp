#pragma once

#include <cstdint>
#include <functional>

#include "adaclk/features.hpp"
#include "adaclk/isa.hpp"

namespace adaclk {

/// Delay of `cur` executed after `prev` (circuit settled under prev).
using PairDelayFn =
    std::function<std::int64_t(const Instruction& prev, const Instruction& cur)>;

struct BalancedDatasetOptions {
  std::array<double, kNumOpKinds> mix{0.25, 0.25, 0.25, 0.25};
  OperandDist operand_dist = OperandDist::SmallMagnitude;
  /// Total candidate budget as a multiple of the requested record count.
  int attempt_factor = 2000;
};

struct BalancedDataset {
  LabeledDataset data;
  Trace trace; // the accepted instructions, in acceptance order
};

/// Rejection-samples random (predecessor, instruction) pairs until each
/// delay class holds exactly n_per_class records. Throws, naming the
/// starved class(es), if the budget runs out first.
BalancedDataset gen_balanced_dataset(int n_per_class, const PairDelayFn& delay_fn,
                                     const DelayClassConfig& cfg, std::uint64_t seed,
                                     const BalancedDatasetOptions& opts = {});

} // namespace adaclk
