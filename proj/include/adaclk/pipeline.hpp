#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "adaclk/features.hpp"
#include "adaclk/oracle.hpp"

#include "json.hpp"

namespace adaclk {

struct PipelineConfig {
  DelayClassConfig cfg;
  int penalty_cycles = 4;
  std::int64_t reexec_period_ps = 0; // 0 = t_wc
  std::int64_t ml_stage_delay_ps = 0;
  std::int64_t switch_latency_ps = 0;

  std::int64_t effective_reexec_period() const {
    return reexec_period_ps > 0 ? reexec_period_ps : cfg.t_wc_ps;
  }
};

void validate(const PipelineConfig& pc);

enum class EnergyMode { FrequencyProportional, Table };

struct EnergyModel {
  EnergyMode mode = EnergyMode::FrequencyProportional;
  double p_baseline = 1.0;                // watts at the worst-case clock
  std::vector<double> power_per_class;    // table mode only
  double p_ml = 0.0;

  double power_for_class(int k, const DelayClassConfig& cfg) const;
};

struct SimResult {
  std::int64_t n_instructions = 0;
  std::int64_t violations = 0;
  // picoseconds; fractional because class periods are fractions of t_wc
  double time_practical = 0.0;
  double time_nopenalty = 0.0;
  double time_ideal = 0.0;
  double time_baseline = 0.0;
  double speedup_practical = 0.0;
  double speedup_nopenalty = 0.0;
  double speedup_ideal = 0.0;
  double energy_overhead_pct = 0.0;
  double power_overhead_pct = 0.0;
  // running average power overhead after each instruction (Fig.-7 series)
  std::vector<double> power_overhead_series;
};

/// Predicted delay class for one profiled instruction (history included).
using Predictor = std::function<int(const ProfileRecord&)>;

double baseline_time(std::size_t n_instructions, const DelayClassConfig& cfg);

SimResult simulate(const Trace& trace, const std::vector<ProfileRecord>& profile,
                   const Predictor& predictor, const PipelineConfig& pc,
                   const EnergyModel& em);

struct BenchResult {
  std::string benchmark;
  int n_classes = 0;
  SimResult sim;
};

/// Human-readable table: per-benchmark rows plus an average row with
/// columns practical speedup, power overhead, energy overhead,
/// instruction count.
std::string format_report_table(const std::vector<BenchResult>& results);

/// Machine-readable report, one object per benchmark per class config.
nlohmann::json report_doc(const std::vector<BenchResult>& results);

/// CSV series `n_instructions,avg_power_overhead`.
std::string format_power_series_csv(const SimResult& r);

} // namespace adaclk
