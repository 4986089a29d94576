#include "adaclk/dataset.hpp"

#include <stdexcept>

#include "adaclk/rng.hpp"

namespace adaclk {

BalancedDataset gen_balanced_dataset(int n_per_class, const PairDelayFn& delay_fn,
                                     const DelayClassConfig& cfg, std::uint64_t seed,
                                     const BalancedDatasetOptions& opts) {
  if (n_per_class < 1) throw std::runtime_error("n_per_class must be positive");
  validate(cfg);
  {
    WorkloadSpec ws;
    ws.count = 1;
    ws.mix = opts.mix;
    validate(ws);
  }

  Rng rng(seed);
  const int total = n_per_class * cfg.n_classes;
  const std::int64_t budget =
      static_cast<std::int64_t>(opts.attempt_factor) * total;
  std::vector<int> quota(static_cast<std::size_t>(cfg.n_classes), n_per_class);
  int remaining = total;

  BalancedDataset out;
  out.trace.seed = seed;
  out.data.records.reserve(static_cast<std::size_t>(total));

  for (std::int64_t attempt = 0; attempt < budget && remaining > 0; ++attempt) {
    const Instruction prev = random_instruction(rng, opts.mix, opts.operand_dist);
    const Instruction cur = random_instruction(rng, opts.mix, opts.operand_dist);
    const std::int64_t d = delay_fn(prev, cur);
    const int label = class_of_delay(d, cfg);
    if (quota[static_cast<std::size_t>(label)] == 0) continue;
    --quota[static_cast<std::size_t>(label)];
    --remaining;
    ProfileRecord r;
    r.instr = cur;
    r.prev_op1 = prev.op1;
    r.prev_op2 = prev.op2;
    r.prev_output = reference_output(prev);
    r.delay_ps = d;
    out.data.records.push_back(r);
    out.data.labels.push_back(label);
    out.trace.instructions.push_back(cur);
  }

  if (remaining > 0) {
    std::string starved;
    for (int k = 0; k < cfg.n_classes; ++k) {
      if (quota[static_cast<std::size_t>(k)] > 0) {
        if (!starved.empty()) starved += ", ";
        starved += std::to_string(k);
      }
    }
    throw std::runtime_error(
        "balanced dataset: class " + starved +
        " starved after " + std::to_string(budget) + " attempts");
  }
  return out;
}

} // namespace adaclk
