#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adaclk/codegen.hpp"
#include "adaclk/dataset.hpp"
#include "adaclk/ml.hpp"
#include "adaclk/netlist.hpp"
#include "adaclk/pipeline.hpp"

#include "json.hpp"

namespace adaclk {

/// Everything the CLI flow needs; see configs/default.json for the
/// on-disk schema. Unknown keys are rejected.
struct RunConfig {
  std::uint64_t seed = 1;
  std::string out_dir = "out";

  int exec_width = 32;
  int mul_width = 16;
  GateDelays gate_delays;
  double delay_scale = 1.0; // per-gate variation hook, ships at 1.0

  std::vector<int> class_configs{2, 3, 4};

  std::size_t workload_count = 2000;
  std::array<double, kNumOpKinds> workload_mix{0.25, 0.25, 0.25, 0.25};
  OperandDist workload_dist = OperandDist::SmallMagnitude;

  int dataset_per_class = 3000;
  BalancedDatasetOptions dataset;

  ModelFamily family = ModelFamily::Rf;
  int rf_n_estimators = 50;
  int rf_max_depth = 20;
  MlpOptions mlp;
  SvmOptions svm;
  RfGrid rf_grid;

  FixedPointSpec fixed_point;

  int penalty_cycles = 4;
  std::int64_t switch_latency_ps = 0;
  EnergyModel energy;
};

RunConfig parse_run_config(const nlohmann::json& j, const std::string& origin = "<config>");
RunConfig load_run_config(const std::string& path);
nlohmann::json to_json(const RunConfig& rc);

} // namespace adaclk
