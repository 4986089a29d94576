#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "adaclk/config.hpp"
#include "adaclk/hwcost.hpp"
#include "adaclk/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace adaclk;

namespace {

// seed-stream tags per stage
constexpr std::uint64_t kTraceStream = 0x7472;
constexpr std::uint64_t kDatasetStream = 0xd500;
constexpr std::uint64_t kTrainStream = 0x1000;
constexpr std::uint64_t kGridStream = 0x2000;

std::string read_text(const std::string& path, const std::string& stage) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error(stage + ": cannot open " + path +
                             " (run the producing stage first)");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

struct Ctx {
  RunConfig rc;
  std::string format = "doc"; // doc | csv

  std::string path(const std::string& name) const { return rc.out_dir + "/" + name; }
  std::string per_class(const std::string& stem, int c, const std::string& ext) const {
    return path(stem + "_" + std::to_string(c) + ext);
  }
};

// ---------------------------------------------------------------------------
// MLP / SVM model persistence (JSON)
// ---------------------------------------------------------------------------

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = j.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<double>();
  return m;
}

json mlp_to_json(const MlpModel& m) {
  json j;
  j["format"] = "mlpfmt v1";
  j["layer_sizes"] = m.layer_sizes;
  j["activation"] = to_string(m.activation);
  j["weights"] = json::array();
  j["biases"] = json::array();
  for (const Eigen::MatrixXd& w : m.weights) j["weights"].push_back(matrix_to_json(w));
  for (const Eigen::VectorXd& b : m.biases)
    j["biases"].push_back(std::vector<double>(b.data(), b.data() + b.size()));
  return j;
}

MlpModel mlp_from_json(const json& j) {
  if (j.value("format", "") != "mlpfmt v1")
    throw std::runtime_error("model: unsupported MLP model format");
  MlpModel m;
  m.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
  m.activation = activation_from_string(j.at("activation").get<std::string>());
  for (const json& w : j.at("weights")) m.weights.push_back(matrix_from_json(w));
  for (const json& b : j.at("biases")) {
    const std::vector<double> v = b.get<std::vector<double>>();
    m.biases.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(),
                                                         static_cast<Eigen::Index>(v.size())));
  }
  return m;
}

json svm_to_json(const SvmModel& m) {
  json j;
  j["format"] = "svmfmt v1";
  j["kernel"] = to_string(m.kernel);
  j["degree"] = m.degree;
  j["gamma"] = m.gamma;
  j["scale"] = m.scale;
  j["support_vectors"] = matrix_to_json(m.support_vectors);
  j["alpha"] = matrix_to_json(m.alpha);
  return j;
}

SvmModel svm_from_json(const json& j) {
  if (j.value("format", "") != "svmfmt v1")
    throw std::runtime_error("model: unsupported SVM model format");
  SvmModel m;
  m.kernel = svm_kernel_from_string(j.at("kernel").get<std::string>());
  m.degree = j.at("degree").get<int>();
  m.gamma = j.at("gamma").get<double>();
  m.scale = j.at("scale").get<double>();
  m.support_vectors = matrix_from_json(j.at("support_vectors"));
  m.alpha = matrix_from_json(j.at("alpha"));
  return m;
}

// ---------------------------------------------------------------------------
// Stages
// ---------------------------------------------------------------------------

ExecUnit load_exec_unit(const Ctx& ctx, const std::string& stage) {
  ExecUnit eu;
  eu.netlist = parse_netlist(read_text(ctx.path("exec_unit.net"), stage),
                             ctx.path("exec_unit.net"));
  eu.width = ctx.rc.exec_width;
  eu.mul_width = ctx.rc.mul_width;
  eu.delays = ctx.rc.gate_delays;
  return eu;
}

DelayClassConfig class_config(const Ctx& ctx, int n_classes, std::int64_t t_wc) {
  (void)ctx;
  return default_class_config(n_classes, t_wc);
}

void cmd_build_exec_unit(Ctx& ctx) {
  const ExecUnit eu = build_exec_unit(ctx.rc.exec_width, ctx.rc.mul_width,
                                      ctx.rc.gate_delays);
  write_text(ctx.path("exec_unit.net"), format_netlist(eu.netlist));
  const std::int64_t t_wc = static_longest_path(eu.netlist);
  std::cout << "build-exec-unit: " << eu.netlist.gates.size() << " gates, t_wc=" << t_wc
            << " ps -> " << ctx.path("exec_unit.net") << "\n";
}

void cmd_profile(Ctx& ctx) {
  const ExecUnit eu = load_exec_unit(ctx, "profile");
  WorkloadSpec spec;
  spec.count = ctx.rc.workload_count;
  spec.mix = ctx.rc.workload_mix;
  spec.operand_dist = ctx.rc.workload_dist;
  spec.seed = derive_seed(ctx.rc.seed, kTraceStream);
  const Trace trace = gen_random_trace(spec);
  write_trace_file(trace, ctx.path("trace.txt"));
  const std::vector<ProfileRecord> profile = profile_trace(eu, trace);
  write_profile_file(profile, ctx.path("profile.csv"));
  std::cout << "profile: " << profile.size() << " records -> " << ctx.path("profile.csv")
            << "\n";
}

void cmd_dataset(Ctx& ctx) {
  const ExecUnit eu = load_exec_unit(ctx, "dataset");
  const std::int64_t t_wc = static_longest_path(eu.netlist);
  Simulator sim(eu.netlist);
  const PairDelayFn delay_fn = [&](const Instruction& prev, const Instruction& cur) {
    return pair_delay(sim, eu, prev, cur);
  };
  for (int c : ctx.rc.class_configs) {
    const DelayClassConfig cfg = class_config(ctx, c, t_wc);
    const BalancedDataset bd =
        gen_balanced_dataset(ctx.rc.dataset_per_class, delay_fn, cfg,
                             derive_seed(ctx.rc.seed, kDatasetStream + static_cast<std::uint64_t>(c)),
                             ctx.rc.dataset);
    write_dataset_file(bd.data, ctx.per_class("dataset", c, ".csv"));
    std::cout << "dataset: " << bd.data.size() << " records ("
              << ctx.rc.dataset_per_class << "/class) -> "
              << ctx.per_class("dataset", c, ".csv") << "\n";
  }
}

struct TrainedArtifacts {
  QuantileTransformer transformer;
  RandomForest rf;
  MlpModel mlp;
  SvmModel svm;
};

TrainedArtifacts load_trained(const Ctx& ctx, int c, const std::string& stage) {
  TrainedArtifacts a;
  a.transformer = QuantileTransformer::deserialize(
      read_text(ctx.per_class("transformer", c, ".qt"), stage));
  switch (ctx.rc.family) {
    case ModelFamily::Rf:
      a.rf = deserialize_forest(read_text(ctx.per_class("model", c, ".rf"), stage));
      break;
    case ModelFamily::Nn:
      a.mlp = mlp_from_json(json::parse(read_text(ctx.per_class("model", c, ".json"), stage)));
      break;
    case ModelFamily::Svm:
      a.svm = svm_from_json(json::parse(read_text(ctx.per_class("model", c, ".json"), stage)));
      break;
  }
  return a;
}

Predictor make_predictor(const Ctx& ctx, const TrainedArtifacts& a) {
  const ModelFamily family = ctx.rc.family;
  return [family, &a](const ProfileRecord& rec) {
    const FeatureVector fv = a.transformer.transform(extract(rec));
    switch (family) {
      case ModelFamily::Rf: return rf_predict(a.rf, fv);
      case ModelFamily::Nn: return a.mlp.predict(fv);
      case ModelFamily::Svm: return a.svm.predict(fv);
    }
    return 0;
  };
}

void cmd_train(Ctx& ctx) {
  for (int c : ctx.rc.class_configs) {
    const LabeledDataset ds =
        parse_dataset_file(ctx.per_class("dataset", c, ".csv"));
    const Eigen::MatrixXd X_raw = to_matrix(ds.records);
    const QuantileTransformer qt = QuantileTransformer::fit(X_raw);
    const Eigen::MatrixXd X = qt.transform(X_raw);
    qt.save(ctx.per_class("transformer", c, ".qt"));
    const std::uint64_t seed =
        derive_seed(ctx.rc.seed, kTrainStream + static_cast<std::uint64_t>(c));
    switch (ctx.rc.family) {
      case ModelFamily::Rf: {
        const RandomForest model =
            rf_train(X, ds.labels, ctx.rc.rf_n_estimators, ctx.rc.rf_max_depth, seed);
        save_forest(model, ctx.per_class("model", c, ".rf"));
        break;
      }
      case ModelFamily::Nn: {
        const MlpModel model = mlp_train(X, ds.labels, c, ctx.rc.mlp, seed);
        write_text(ctx.per_class("model", c, ".json"), mlp_to_json(model).dump(2) + "\n");
        break;
      }
      case ModelFamily::Svm: {
        const SvmModel model = svm_train(X, ds.labels, c, ctx.rc.svm, seed);
        write_text(ctx.per_class("model", c, ".json"), svm_to_json(model).dump(2) + "\n");
        break;
      }
    }
    std::cout << "train: " << to_string(ctx.rc.family) << " model for " << c
              << "-class config -> " << ctx.rc.out_dir << "\n";
  }
}

void cmd_gridsearch(Ctx& ctx) {
  for (int c : ctx.rc.class_configs) {
    const LabeledDataset ds = parse_dataset_file(ctx.per_class("dataset", c, ".csv"));
    const Eigen::MatrixXd X_raw = to_matrix(ds.records);
    const QuantileTransformer qt = QuantileTransformer::fit(X_raw);
    const Eigen::MatrixXd X = qt.transform(X_raw);
    const std::uint64_t seed =
        derive_seed(ctx.rc.seed, kGridStream + static_cast<std::uint64_t>(c));

    // speedup/cost columns need the profiled workload; skipped when absent
    std::vector<ProfileRecord> profile;
    std::int64_t t_wc = 0;
    if (fs::exists(ctx.path("profile.csv")) && fs::exists(ctx.path("exec_unit.net"))) {
      profile = parse_profile_file(ctx.path("profile.csv"));
      t_wc = static_longest_path(load_exec_unit(ctx, "gridsearch").netlist);
    }
    GridEval eval;
    GridEval* eval_ptr = nullptr;
    if (!profile.empty()) {
      const DelayClassConfig cfg = class_config(ctx, c, t_wc);
      eval.evaluate = [&, cfg](const Trainer& trainer, const std::string& params) {
        const auto predict = trainer(X, ds.labels, seed);
        PipelineConfig pc;
        pc.cfg = cfg;
        pc.penalty_cycles = ctx.rc.penalty_cycles;
        Trace trace;
        for (const ProfileRecord& r : profile) trace.instructions.push_back(r.instr);
        const SimResult sr = simulate(
            trace, profile,
            [&](const ProfileRecord& rec) { return predict(qt.transform(extract(rec))); },
            pc, ctx.rc.energy);
        // cost from the hyperparameters in the row label
        double mtransistors = 0.0;
        std::istringstream ss(params);
        std::string tok;
        int n_est = 0, depth = 0;
        while (ss >> tok) {
          if (tok.rfind("n_estimators=", 0) == 0) n_est = std::stoi(tok.substr(13));
          if (tok.rfind("max_depth=", 0) == 0) depth = std::stoi(tok.substr(10));
        }
        if (n_est > 0 && depth > 0)
          mtransistors = rf_cost(n_est, depth).transistors_millions();
        return std::make_pair(sr.speedup_practical, mtransistors);
      };
      eval_ptr = &eval;
    }

    std::vector<GridRow> rows;
    switch (ctx.rc.family) {
      case ModelFamily::Rf:
        rows = grid_search_rf(ctx.rc.rf_grid, X, ds.labels, c, seed, eval_ptr);
        break;
      case ModelFamily::Nn:
        rows = grid_search_nn(NnGrid{}, X, ds.labels, c, seed, nullptr);
        break;
      case ModelFamily::Svm:
        rows = grid_search_svm(SvmGrid{}, X, ds.labels, c, seed, nullptr);
        break;
    }
    write_text(ctx.per_class("grid", c, ".csv"), format_grid_csv(rows));
    std::cout << "gridsearch: " << rows.size() << " rows -> "
              << ctx.per_class("grid", c, ".csv") << "\n";
  }
}

void cmd_codegen(Ctx& ctx) {
  if (ctx.rc.family != ModelFamily::Rf)
    throw std::runtime_error("codegen: only the rf family compiles to a netlist");
  const ExecUnit eu = load_exec_unit(ctx, "codegen");
  const std::int64_t t_wc = static_longest_path(eu.netlist);
  for (int c : ctx.rc.class_configs) {
    const RandomForest model =
        deserialize_forest(read_text(ctx.per_class("model", c, ".rf"), "codegen"));
    const ForestNetlist fn =
        forest_to_netlist(model, ctx.rc.fixed_point, ctx.rc.gate_delays);
    write_text(ctx.per_class("forest", c, ".net"), format_netlist(fn.netlist));
    const std::int64_t stage_delay = static_longest_path(fn.netlist);
    const DelayClassConfig cfg = class_config(ctx, c, t_wc);
    const double stage_period = cfg.class_period_ps(0);
    if (static_cast<double>(stage_delay) > stage_period)
      std::cerr << "codegen: constraint warning: ML stage delay " << stage_delay
                << " ps exceeds the fastest stage period " << stage_period
                << " ps for the " << c
                << "-class config; a multi-stage ML unit would be required\n";
    json meta;
    meta["format"] = "forestmeta v1";
    meta["n_classes"] = fn.n_classes;
    meta["class_bits"] = fn.class_bits;
    meta["fixed_point"] = {{"total_bits", fn.fp.total_bits},
                           {"fraction_bits", fn.fp.fraction_bits}};
    meta["comparators_physical"] = fn.comparators_physical;
    meta["comparators_cost_model"] =
        rf_cost(model.n_estimators, model.max_depth).n_comparators;
    meta["stage_delay_ps"] = stage_delay;
    meta["gate_count"] = fn.netlist.gates.size();
    write_text(ctx.per_class("forest", c, ".json"), meta.dump(2) + "\n");
    std::cout << "codegen: " << fn.netlist.gates.size() << " gates, delay "
              << stage_delay << " ps -> " << ctx.per_class("forest", c, ".net") << "\n";
  }
}

void cmd_simulate(Ctx& ctx) {
  const ExecUnit eu = load_exec_unit(ctx, "simulate");
  const std::int64_t t_wc = static_longest_path(eu.netlist);
  const Trace trace = parse_trace_file(ctx.path("trace.txt"));
  const std::vector<ProfileRecord> profile = parse_profile_file(ctx.path("profile.csv"));
  for (int c : ctx.rc.class_configs) {
    const TrainedArtifacts a = load_trained(ctx, c, "simulate");
    PipelineConfig pc;
    pc.cfg = class_config(ctx, c, t_wc);
    pc.penalty_cycles = ctx.rc.penalty_cycles;
    pc.switch_latency_ps = ctx.rc.switch_latency_ps;
    const std::string meta_path = ctx.per_class("forest", c, ".json");
    if (fs::exists(meta_path))
      pc.ml_stage_delay_ps =
          json::parse(read_text(meta_path, "simulate")).value("stage_delay_ps", 0);
    const SimResult r = simulate(trace, profile, make_predictor(ctx, a), pc, ctx.rc.energy);
    json doc;
    doc["format"] = "simresult v1";
    doc["n_classes"] = c;
    doc["n_instructions"] = r.n_instructions;
    doc["violations"] = r.violations;
    doc["time_practical_ps"] = r.time_practical;
    doc["time_nopenalty_ps"] = r.time_nopenalty;
    doc["time_ideal_ps"] = r.time_ideal;
    doc["time_baseline_ps"] = r.time_baseline;
    doc["practical_speedup"] = r.speedup_practical;
    doc["nopenalty_speedup"] = r.speedup_nopenalty;
    doc["ideal_speedup"] = r.speedup_ideal;
    doc["power_overhead_pct"] = r.power_overhead_pct;
    doc["energy_overhead_pct"] = r.energy_overhead_pct;
    write_text(ctx.per_class("result", c, ".json"), doc.dump(2) + "\n");
    write_text(ctx.per_class("power_series", c, ".csv"), format_power_series_csv(r));
    std::cout << "simulate: " << c << "-class practical speedup "
              << r.speedup_practical << ", " << r.violations << " violations -> "
              << ctx.per_class("result", c, ".json") << "\n";
  }
}

void cmd_report(Ctx& ctx) {
  std::vector<BenchResult> results;
  for (int c : ctx.rc.class_configs) {
    const json doc = json::parse(read_text(ctx.per_class("result", c, ".json"), "report"));
    BenchResult b;
    b.benchmark = "workload";
    b.n_classes = c;
    b.sim.n_instructions = doc.at("n_instructions").get<std::int64_t>();
    b.sim.violations = doc.at("violations").get<std::int64_t>();
    b.sim.speedup_practical = doc.at("practical_speedup").get<double>();
    b.sim.speedup_nopenalty = doc.at("nopenalty_speedup").get<double>();
    b.sim.speedup_ideal = doc.at("ideal_speedup").get<double>();
    b.sim.power_overhead_pct = doc.at("power_overhead_pct").get<double>();
    b.sim.energy_overhead_pct = doc.at("energy_overhead_pct").get<double>();
    results.push_back(b);
  }
  write_text(ctx.path("report.txt"), format_report_table(results));
  if (ctx.format == "csv") {
    std::ostringstream csv;
    csv << "benchmark,n_classes,practical_speedup,power_overhead_pct,"
           "energy_overhead_pct,instruction_count\n";
    char buf[160];
    for (const BenchResult& b : results) {
      std::snprintf(buf, sizeof buf, "%s,%d,%.6f,%.6f,%.6f,%lld\n",
                    b.benchmark.c_str(), b.n_classes, b.sim.speedup_practical,
                    b.sim.power_overhead_pct, b.sim.energy_overhead_pct,
                    static_cast<long long>(b.sim.n_instructions));
      csv << buf;
    }
    write_text(ctx.path("report.csv"), csv.str());
  } else {
    write_text(ctx.path("report.json"), report_doc(results).dump(2) + "\n");
  }
  std::cout << format_report_table(results);
}

void cmd_run_all(Ctx& ctx) {
  cmd_build_exec_unit(ctx);
  cmd_profile(ctx);
  cmd_dataset(ctx);
  cmd_train(ctx);
  cmd_gridsearch(ctx);
  cmd_codegen(ctx);
  cmd_simulate(ctx);
  cmd_report(ctx);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaclk: adaptive-clock ML pipeline toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir, format;
  std::uint64_t seed = 0;
  int classes = 0;
  bool seed_set = false, classes_set = false;
  app.add_option("--config", config_path, "run configuration (JSON)");
  app.add_option("--seed", seed, "master seed override")->each([&](const std::string&) {
    seed_set = true;
  });
  app.add_option("--classes", classes, "restrict to one class config (2|3|4)")
      ->each([&](const std::string&) { classes_set = true; });
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--format", format, "report format: csv|doc");

  std::string command;
  for (const char* name :
       {"build-exec-unit", "profile", "dataset", "train", "gridsearch", "codegen",
        "simulate", "report", "run-all"}) {
    CLI::App* sub = app.add_subcommand(name, "");
    sub->callback([&command, name] { command = name; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    // precedence: config file < environment < flags
    if (config_path.empty())
      if (const char* env = std::getenv("ADACLK_CONFIG")) config_path = env;

    Ctx ctx;
    if (!config_path.empty()) ctx.rc = load_run_config(config_path);
    if (const char* env = std::getenv("ADACLK_SEED"); env && !seed_set)
      ctx.rc.seed = std::stoull(env);
    if (const char* env = std::getenv("ADACLK_OUT"); env && out_dir.empty())
      ctx.rc.out_dir = env;
    if (const char* env = std::getenv("ADACLK_CLASSES"); env && !classes_set)
      ctx.rc.class_configs = {std::stoi(env)};
    if (const char* env = std::getenv("ADACLK_FORMAT"); env) ctx.format = env;
    if (seed_set) ctx.rc.seed = seed;
    if (classes_set) {
      if (classes < 2 || classes > 4)
        throw std::runtime_error("config: --classes must be 2, 3 or 4");
      ctx.rc.class_configs = {classes};
    }
    if (!out_dir.empty()) ctx.rc.out_dir = out_dir;
    if (!format.empty()) ctx.format = format;
    if (ctx.format != "csv" && ctx.format != "doc")
      throw std::runtime_error("config: --format must be csv or doc");

    fs::create_directories(ctx.rc.out_dir);

    if (command == "build-exec-unit") cmd_build_exec_unit(ctx);
    else if (command == "profile") cmd_profile(ctx);
    else if (command == "dataset") cmd_dataset(ctx);
    else if (command == "train") cmd_train(ctx);
    else if (command == "gridsearch") cmd_gridsearch(ctx);
    else if (command == "codegen") cmd_codegen(ctx);
    else if (command == "simulate") cmd_simulate(ctx);
    else if (command == "report") cmd_report(ctx);
    else if (command == "run-all") cmd_run_all(ctx);
  } catch (const std::exception& e) {
    std::cerr << "adaclk " << command << ": error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
