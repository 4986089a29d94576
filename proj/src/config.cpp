#include "adaclk/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace adaclk {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& section,
                const std::set<std::string>& allowed) {
  if (!obj.is_object())
    throw std::runtime_error("config: section '" + section + "' must be an object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key))
      throw std::runtime_error("config: unknown key '" + key + "' in " + section);
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  return obj.at(key).get<T>();
}

} // namespace

RunConfig parse_run_config(const json& j, const std::string& origin) {
  RunConfig rc;
  try {
    check_keys(j, origin,
               {"seed", "out_dir", "exec_unit", "gate_delays", "class_configs",
                "workload", "dataset", "model", "grid", "fixed_point", "pipeline",
                "energy"});
    rc.seed = get_or<std::uint64_t>(j, "seed", rc.seed);
    rc.out_dir = get_or<std::string>(j, "out_dir", rc.out_dir);

    if (j.contains("exec_unit")) {
      const json& e = j.at("exec_unit");
      check_keys(e, "exec_unit", {"width", "mul_width"});
      rc.exec_width = get_or<int>(e, "width", rc.exec_width);
      rc.mul_width = get_or<int>(e, "mul_width", rc.mul_width);
    }
    if (j.contains("gate_delays")) {
      const json& g = j.at("gate_delays");
      check_keys(g, "gate_delays",
                 {"not", "buf", "and", "or", "nand", "nor", "xor", "mux2", "scale"});
      rc.gate_delays.not_ps = get_or<int>(g, "not", rc.gate_delays.not_ps);
      rc.gate_delays.buf_ps = get_or<int>(g, "buf", rc.gate_delays.buf_ps);
      rc.gate_delays.and_ps = get_or<int>(g, "and", rc.gate_delays.and_ps);
      rc.gate_delays.or_ps = get_or<int>(g, "or", rc.gate_delays.or_ps);
      rc.gate_delays.nand_ps = get_or<int>(g, "nand", rc.gate_delays.nand_ps);
      rc.gate_delays.nor_ps = get_or<int>(g, "nor", rc.gate_delays.nor_ps);
      rc.gate_delays.xor_ps = get_or<int>(g, "xor", rc.gate_delays.xor_ps);
      rc.gate_delays.mux2_ps = get_or<int>(g, "mux2", rc.gate_delays.mux2_ps);
      rc.delay_scale = get_or<double>(g, "scale", rc.delay_scale);
    }
    if (j.contains("class_configs")) {
      rc.class_configs = j.at("class_configs").get<std::vector<int>>();
      if (rc.class_configs.empty())
        throw std::runtime_error("config: class_configs must be non-empty");
      for (int c : rc.class_configs)
        if (c < 2 || c > 4)
          throw std::runtime_error("config: class_configs entries must be 2, 3 or 4");
    }
    if (j.contains("workload")) {
      const json& w = j.at("workload");
      check_keys(w, "workload", {"count", "mix", "operand_dist"});
      rc.workload_count = get_or<std::size_t>(w, "count", rc.workload_count);
      if (w.contains("mix")) {
        const json& m = w.at("mix");
        check_keys(m, "workload.mix", {"arith", "arith_imm", "logical", "muldiv"});
        rc.workload_mix = {get_or<double>(m, "arith", 0.25),
                           get_or<double>(m, "arith_imm", 0.25),
                           get_or<double>(m, "logical", 0.25),
                           get_or<double>(m, "muldiv", 0.25)};
      }
      if (w.contains("operand_dist"))
        rc.workload_dist = operand_dist_from_string(w.at("operand_dist").get<std::string>());
    }
    if (j.contains("dataset")) {
      const json& d = j.at("dataset");
      check_keys(d, "dataset", {"per_class", "operand_dist", "attempt_factor"});
      rc.dataset_per_class = get_or<int>(d, "per_class", rc.dataset_per_class);
      if (d.contains("operand_dist"))
        rc.dataset.operand_dist =
            operand_dist_from_string(d.at("operand_dist").get<std::string>());
      rc.dataset.attempt_factor = get_or<int>(d, "attempt_factor", rc.dataset.attempt_factor);
    }
    if (j.contains("model")) {
      const json& m = j.at("model");
      check_keys(m, "model",
                 {"family", "n_estimators", "max_depth", "hidden", "activation",
                  "solver", "epochs", "learning_rate", "kernel", "degree",
                  "gamma", "svm_epochs", "lambda"});
      if (m.contains("family"))
        rc.family = model_family_from_string(m.at("family").get<std::string>());
      rc.rf_n_estimators = get_or<int>(m, "n_estimators", rc.rf_n_estimators);
      rc.rf_max_depth = get_or<int>(m, "max_depth", rc.rf_max_depth);
      rc.mlp.hidden = get_or<std::vector<int>>(m, "hidden", std::vector<int>{20, 10});
      if (m.contains("activation"))
        rc.mlp.activation = activation_from_string(m.at("activation").get<std::string>());
      if (m.contains("solver"))
        rc.mlp.solver = solver_from_string(m.at("solver").get<std::string>());
      rc.mlp.epochs = get_or<int>(m, "epochs", rc.mlp.epochs);
      rc.mlp.learning_rate = get_or<double>(m, "learning_rate", rc.mlp.learning_rate);
      if (m.contains("kernel"))
        rc.svm.kernel = svm_kernel_from_string(m.at("kernel").get<std::string>());
      rc.svm.degree = get_or<int>(m, "degree", rc.svm.degree);
      if (m.contains("gamma"))
        rc.svm.gamma_mode = gamma_mode_from_string(m.at("gamma").get<std::string>());
      rc.svm.epochs = get_or<int>(m, "svm_epochs", rc.svm.epochs);
      rc.svm.lambda = get_or<double>(m, "lambda", rc.svm.lambda);
    }
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      check_keys(g, "grid", {"n_estimators", "max_depth"});
      rc.rf_grid.n_estimators =
          get_or<std::vector<int>>(g, "n_estimators", rc.rf_grid.n_estimators);
      rc.rf_grid.max_depth = get_or<std::vector<int>>(g, "max_depth", rc.rf_grid.max_depth);
    }
    if (j.contains("fixed_point")) {
      const json& f = j.at("fixed_point");
      check_keys(f, "fixed_point", {"total_bits", "fraction_bits"});
      rc.fixed_point.total_bits = get_or<int>(f, "total_bits", rc.fixed_point.total_bits);
      rc.fixed_point.fraction_bits =
          get_or<int>(f, "fraction_bits", rc.fixed_point.fraction_bits);
      validate(rc.fixed_point);
    }
    if (j.contains("pipeline")) {
      const json& p = j.at("pipeline");
      check_keys(p, "pipeline", {"penalty_cycles", "switch_latency_ps"});
      rc.penalty_cycles = get_or<int>(p, "penalty_cycles", rc.penalty_cycles);
      rc.switch_latency_ps =
          get_or<std::int64_t>(p, "switch_latency_ps", rc.switch_latency_ps);
    }
    if (j.contains("energy")) {
      const json& e = j.at("energy");
      check_keys(e, "energy", {"mode", "p_baseline", "p_ml", "power_per_class"});
      if (e.contains("mode")) {
        const std::string mode = e.at("mode").get<std::string>();
        if (mode == "frequency_proportional")
          rc.energy.mode = EnergyMode::FrequencyProportional;
        else if (mode == "table")
          rc.energy.mode = EnergyMode::Table;
        else
          throw std::runtime_error("config: unknown energy mode '" + mode + "'");
      }
      rc.energy.p_baseline = get_or<double>(e, "p_baseline", rc.energy.p_baseline);
      rc.energy.p_ml = get_or<double>(e, "p_ml", rc.energy.p_ml);
      rc.energy.power_per_class =
          get_or<std::vector<double>>(e, "power_per_class", rc.energy.power_per_class);
    }
  } catch (const json::exception& e) {
    throw std::runtime_error("config: " + origin + ": " + e.what());
  }
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("config: " + path + ": " + e.what());
  }
  return parse_run_config(j, path);
}

json to_json(const RunConfig& rc) {
  json j;
  j["seed"] = rc.seed;
  j["out_dir"] = rc.out_dir;
  j["exec_unit"] = {{"width", rc.exec_width}, {"mul_width", rc.mul_width}};
  j["gate_delays"] = {{"not", rc.gate_delays.not_ps}, {"buf", rc.gate_delays.buf_ps},
                      {"and", rc.gate_delays.and_ps}, {"or", rc.gate_delays.or_ps},
                      {"nand", rc.gate_delays.nand_ps}, {"nor", rc.gate_delays.nor_ps},
                      {"xor", rc.gate_delays.xor_ps}, {"mux2", rc.gate_delays.mux2_ps},
                      {"scale", rc.delay_scale}};
  j["class_configs"] = rc.class_configs;
  j["workload"] = {{"count", rc.workload_count},
                   {"mix",
                    {{"arith", rc.workload_mix[0]},
                     {"arith_imm", rc.workload_mix[1]},
                     {"logical", rc.workload_mix[2]},
                     {"muldiv", rc.workload_mix[3]}}},
                   {"operand_dist", to_string(rc.workload_dist)}};
  j["dataset"] = {{"per_class", rc.dataset_per_class},
                  {"operand_dist", to_string(rc.dataset.operand_dist)},
                  {"attempt_factor", rc.dataset.attempt_factor}};
  j["model"] = {{"family", to_string(rc.family)},
                {"n_estimators", rc.rf_n_estimators},
                {"max_depth", rc.rf_max_depth}};
  j["grid"] = {{"n_estimators", rc.rf_grid.n_estimators},
               {"max_depth", rc.rf_grid.max_depth}};
  j["fixed_point"] = {{"total_bits", rc.fixed_point.total_bits},
                      {"fraction_bits", rc.fixed_point.fraction_bits}};
  j["pipeline"] = {{"penalty_cycles", rc.penalty_cycles},
                   {"switch_latency_ps", rc.switch_latency_ps}};
  j["energy"] = {{"mode", rc.energy.mode == EnergyMode::Table ? "table"
                                                              : "frequency_proportional"},
                 {"p_baseline", rc.energy.p_baseline},
                 {"p_ml", rc.energy.p_ml},
                 {"power_per_class", rc.energy.power_per_class}};
  return j;
}

} // namespace adaclk
