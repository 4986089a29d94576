#include "adaclk/pipeline.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace adaclk {

void validate(const PipelineConfig& pc) {
  validate(pc.cfg);
  if (pc.penalty_cycles < 0)
    throw std::runtime_error("pipeline: penalty_cycles must be >= 0");
  if (pc.effective_reexec_period() < pc.cfg.t_wc_ps)
    throw std::runtime_error("pipeline: reexec_period must cover t_wc");
  if (pc.ml_stage_delay_ps < 0 || pc.switch_latency_ps < 0)
    throw std::runtime_error("pipeline: stage delays must be >= 0");
}

double EnergyModel::power_for_class(int k, const DelayClassConfig& cfg) const {
  if (mode == EnergyMode::FrequencyProportional)
    return p_baseline * static_cast<double>(cfg.t_wc_ps) / cfg.class_period_ps(k);
  if (k < 0 || k >= static_cast<int>(power_per_class.size()))
    throw std::runtime_error("energy model: no table power for class " +
                             std::to_string(k));
  return power_per_class[static_cast<std::size_t>(k)];
}

double baseline_time(std::size_t n_instructions, const DelayClassConfig& cfg) {
  return static_cast<double>(n_instructions) * static_cast<double>(cfg.t_wc_ps);
}

SimResult simulate(const Trace& trace, const std::vector<ProfileRecord>& profile,
                   const Predictor& predictor, const PipelineConfig& pc,
                   const EnergyModel& em) {
  validate(pc);
  if (profile.size() != trace.instructions.size())
    throw std::runtime_error("pipeline: profile not aligned with trace");
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const Instruction& a = trace.instructions[i];
    const Instruction& b = profile[i].instr;
    if (a.kind != b.kind || a.subop != b.subop || a.op1 != b.op1 || a.op2 != b.op2)
      throw std::runtime_error("pipeline: profile not aligned with trace at record " +
                               std::to_string(i));
  }

  const std::vector<double> periods = pc.cfg.class_periods();
  const double reexec = static_cast<double>(pc.effective_reexec_period());
  const double penalty = static_cast<double>(pc.penalty_cycles) * reexec;

  SimResult r;
  r.n_instructions = static_cast<std::int64_t>(profile.size());
  r.time_baseline = baseline_time(profile.size(), pc.cfg);
  r.power_overhead_series.reserve(profile.size());

  double energy = 0.0;
  int prev_class = -1;
  for (const ProfileRecord& rec : profile) {
    const int c = predictor(rec);
    if (c < 0 || c >= pc.cfg.n_classes)
      throw std::runtime_error("pipeline: predictor emitted out-of-range class " +
                               std::to_string(c));
    const int true_c = class_of_delay(rec.delay_ps, pc.cfg);
    const double chosen = periods[static_cast<std::size_t>(c)];
    const double ideal = periods[static_cast<std::size_t>(true_c)];
    const bool violation = static_cast<double>(rec.delay_ps) > chosen;

    r.time_practical += chosen;
    energy += em.power_for_class(c, pc.cfg) * chosen;
    if (violation) {
      r.time_practical += penalty;
      energy += em.p_baseline * penalty;
      ++r.violations;
    }
    if (c > true_c) {
      r.time_nopenalty += ideal; // over-slow idle time disregarded
    } else {
      r.time_nopenalty += chosen;
      if (violation) r.time_nopenalty += penalty;
    }
    r.time_ideal += ideal;

    if (prev_class >= 0 && c != prev_class)
      r.time_practical += static_cast<double>(pc.switch_latency_ps);
    prev_class = c;

    // running power overhead over the prefix (ML power included)
    const double t = r.time_practical;
    const double p_avg = (energy + em.p_ml * t) / t;
    r.power_overhead_series.push_back((p_avg - em.p_baseline) / em.p_baseline * 100.0);
  }
  energy += em.p_ml * r.time_practical;

  r.speedup_practical = r.n_instructions ? r.time_baseline / r.time_practical : 1.0;
  r.speedup_nopenalty = r.n_instructions ? r.time_baseline / r.time_nopenalty : 1.0;
  r.speedup_ideal = r.n_instructions ? r.time_baseline / r.time_ideal : 1.0;

  const double e_base = em.p_baseline * r.time_baseline;
  if (r.n_instructions) {
    r.energy_overhead_pct = (energy - e_base) / e_base * 100.0;
    const double p_avg = energy / r.time_practical;
    r.power_overhead_pct = (p_avg - em.p_baseline) / em.p_baseline * 100.0;
  }
  return r;
}

std::string format_report_table(const std::vector<BenchResult>& results) {
  std::ostringstream out;
  char buf[256];
  out << "benchmark            classes  practical_speedup  power_overhead_pct  "
         "energy_overhead_pct  instructions\n";
  double sum_speedup = 0.0, sum_power = 0.0, sum_energy = 0.0;
  std::int64_t sum_n = 0;
  for (const BenchResult& b : results) {
    std::snprintf(buf, sizeof buf, "%-20s %7d  %17.3f  %18.3f  %19.3f  %12lld\n",
                  b.benchmark.c_str(), b.n_classes, b.sim.speedup_practical,
                  b.sim.power_overhead_pct, b.sim.energy_overhead_pct,
                  static_cast<long long>(b.sim.n_instructions));
    out << buf;
    sum_speedup += b.sim.speedup_practical;
    sum_power += b.sim.power_overhead_pct;
    sum_energy += b.sim.energy_overhead_pct;
    sum_n += b.sim.n_instructions;
  }
  if (!results.empty()) {
    const double n = static_cast<double>(results.size());
    std::snprintf(buf, sizeof buf, "%-20s %7s  %17.3f  %18.3f  %19.3f  %12lld\n",
                  "average", "-", sum_speedup / n, sum_power / n, sum_energy / n,
                  static_cast<long long>(sum_n));
    out << buf;
  }
  return out.str();
}

nlohmann::json report_doc(const std::vector<BenchResult>& results) {
  nlohmann::json rows = nlohmann::json::array();
  double sum_speedup = 0.0, sum_power = 0.0, sum_energy = 0.0;
  for (const BenchResult& b : results) {
    rows.push_back({{"benchmark", b.benchmark},
                    {"n_classes", b.n_classes},
                    {"practical_speedup", b.sim.speedup_practical},
                    {"nopenalty_speedup", b.sim.speedup_nopenalty},
                    {"ideal_speedup", b.sim.speedup_ideal},
                    {"power_overhead_pct", b.sim.power_overhead_pct},
                    {"energy_overhead_pct", b.sim.energy_overhead_pct},
                    {"violations", b.sim.violations},
                    {"instruction_count", b.sim.n_instructions}});
    sum_speedup += b.sim.speedup_practical;
    sum_power += b.sim.power_overhead_pct;
    sum_energy += b.sim.energy_overhead_pct;
  }
  nlohmann::json doc;
  doc["benchmarks"] = rows;
  if (!results.empty()) {
    const double n = static_cast<double>(results.size());
    doc["average"] = {{"practical_speedup", sum_speedup / n},
                      {"power_overhead_pct", sum_power / n},
                      {"energy_overhead_pct", sum_energy / n}};
  }
  return doc;
}

std::string format_power_series_csv(const SimResult& r) {
  std::ostringstream out;
  out << "n_instructions,avg_power_overhead\n";
  char buf[64];
  for (std::size_t i = 0; i < r.power_overhead_series.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.6f\n", i + 1, r.power_overhead_series[i]);
    out << buf;
  }
  return out.str();
}

} // namespace adaclk
