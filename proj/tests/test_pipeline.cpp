#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "adaclk/pipeline.hpp"
#include "adaclk/rng.hpp"

using namespace adaclk;

namespace {

constexpr std::int64_t kTwc = 1000;

// synthetic trace + profile with prescribed delays
std::pair<Trace, std::vector<ProfileRecord>> synth(const std::vector<std::int64_t>& delays) {
  Trace t;
  std::vector<ProfileRecord> profile;
  for (std::size_t i = 0; i < delays.size(); ++i) {
    Instruction in;
    in.kind = OpKind::Arith;
    in.subop = SubOp::Add;
    in.op1 = static_cast<std::uint32_t>(i);
    t.instructions.push_back(in);
    ProfileRecord r;
    r.instr = in;
    r.delay_ps = delays[i];
    profile.push_back(r);
  }
  return {t, profile};
}

PipelineConfig config2(std::int64_t t_wc = kTwc) {
  PipelineConfig pc;
  pc.cfg = default_class_config(2, t_wc);
  return pc;
}

Predictor perfect(const DelayClassConfig& cfg) {
  return [cfg](const ProfileRecord& r) { return class_of_delay(r.delay_ps, cfg); };
}

} // namespace

TEST_CASE("baseline time") {
  const DelayClassConfig cfg = default_class_config(2, 4000);
  CHECK(baseline_time(0, cfg) == 0.0);
  CHECK(baseline_time(10, cfg) == 40000.0);
}

TEST_CASE("perfect predictor: practical equals ideal, zero violations") {
  auto [t, profile] = synth({100, 600, 550, 990, 10, 551});
  const PipelineConfig pc = config2();
  EnergyModel em;
  const SimResult r = simulate(t, profile, perfect(pc.cfg), pc, em);
  CHECK(r.violations == 0);
  CHECK(r.time_practical == r.time_ideal);
  CHECK(r.speedup_practical == r.speedup_ideal);
}

TEST_CASE("all-fast trace: closed-form speedup 1/0.55") {
  std::vector<std::int64_t> delays(50, 100); // all truly fast
  auto [t, profile] = synth(delays);
  const PipelineConfig pc = config2();
  EnergyModel em;
  const SimResult r =
      simulate(t, profile, [](const ProfileRecord&) { return 0; }, pc, em);
  CHECK(r.violations == 0);
  CHECK(std::abs(r.speedup_practical - 1.0 / 0.55) < 1e-12 * (1.0 / 0.55));
}

TEST_CASE("one slow instruction predicted fast: penalty dominates") {
  auto [t, profile] = synth({900});
  const PipelineConfig pc = config2();
  EnergyModel em;
  const SimResult r =
      simulate(t, profile, [](const ProfileRecord&) { return 0; }, pc, em);
  CHECK(r.violations == 1);
  CHECK(r.time_practical == doctest::Approx(0.55 * kTwc + 4.0 * kTwc));
  CHECK(r.speedup_practical == doctest::Approx(1.0 / 4.55));
}

TEST_CASE("always-slowest predictor degenerates to the baseline") {
  Rng rng(3);
  std::vector<std::int64_t> delays;
  for (int i = 0; i < 200; ++i) delays.push_back(static_cast<std::int64_t>(rng.below(kTwc + 1)));
  auto [t, profile] = synth(delays);
  const PipelineConfig pc = config2();
  EnergyModel em;
  const SimResult r =
      simulate(t, profile, [](const ProfileRecord&) { return 1; }, pc, em);
  CHECK(r.violations == 0);
  CHECK(r.speedup_practical == doctest::Approx(1.0));
  CHECK(r.time_practical == doctest::Approx(baseline_time(delays.size(), pc.cfg)));
}

TEST_CASE("speedup ordering holds for random traces and predictors") {
  Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(30));
    std::vector<std::int64_t> delays;
    for (int i = 0; i < n; ++i)
      delays.push_back(static_cast<std::int64_t>(rng.below(kTwc + 1)));
    auto [t, profile] = synth(delays);
    const int n_classes = 2 + static_cast<int>(rng.below(3));
    PipelineConfig pc;
    pc.cfg = default_class_config(n_classes, kTwc);
    EnergyModel em;
    const std::uint64_t pseed = rng.next_u64();
    const Predictor p = [n_classes, pseed](const ProfileRecord& r) {
      return static_cast<int>(derive_seed(pseed, r.instr.op1) %
                              static_cast<std::uint64_t>(n_classes));
    };
    const SimResult r = simulate(t, profile, p, pc, em);
    CHECK(r.speedup_practical <= r.speedup_nopenalty + 1e-12);
    CHECK(r.speedup_nopenalty <= r.speedup_ideal + 1e-12);

    // conservation: practical time decomposes exactly
    double expected = 0.0;
    for (int i = 0; i < n; ++i)
      expected += pc.cfg.class_period_ps(p(profile[static_cast<std::size_t>(i)]));
    expected += static_cast<double>(r.violations) * 4.0 * kTwc;
    CHECK(r.time_practical == doctest::Approx(expected));
  }
}

TEST_CASE("refining class boundaries never hurts the ideal speedup") {
  Rng rng(11);
  std::vector<std::int64_t> delays;
  for (int i = 0; i < 500; ++i)
    delays.push_back(static_cast<std::int64_t>(rng.below(kTwc + 1)));
  auto [t, profile] = synth(delays);
  EnergyModel em;

  PipelineConfig coarse;
  coarse.cfg.n_classes = 2;
  coarse.cfg.boundaries = {0.55};
  coarse.cfg.t_wc_ps = kTwc;
  PipelineConfig fine;
  fine.cfg.n_classes = 3;
  fine.cfg.boundaries = {0.30, 0.55}; // adds one cut
  fine.cfg.t_wc_ps = kTwc;

  const SimResult a = simulate(t, profile, perfect(coarse.cfg), coarse, em);
  const SimResult b = simulate(t, profile, perfect(fine.cfg), fine, em);
  CHECK(b.speedup_ideal >= a.speedup_ideal);
}

TEST_CASE("energy identity for the perfect predictor") {
  Rng rng(13);
  std::vector<std::int64_t> delays;
  for (int i = 0; i < 300; ++i)
    delays.push_back(static_cast<std::int64_t>(rng.below(kTwc + 1)));
  auto [t, profile] = synth(delays);
  const PipelineConfig pc = config2();
  EnergyModel em; // frequency-proportional, p_ml = 0
  const SimResult r = simulate(t, profile, perfect(pc.cfg), pc, em);
  CHECK(std::abs(r.energy_overhead_pct) < 1e-9);

  EnergyModel with_ml = em;
  with_ml.p_ml = 0.05;
  const SimResult r2 = simulate(t, profile, perfect(pc.cfg), pc, with_ml);
  CHECK(r2.energy_overhead_pct > 0.0);
}

TEST_CASE("misaligned profile and bad predictor classes are rejected") {
  auto [t, profile] = synth({100, 200});
  const PipelineConfig pc = config2();
  EnergyModel em;
  auto bad_profile = profile;
  bad_profile.pop_back();
  CHECK_THROWS(simulate(t, bad_profile, perfect(pc.cfg), pc, em));
  CHECK_THROWS(simulate(t, profile, [](const ProfileRecord&) { return 9; }, pc, em));
}

TEST_CASE("report table and doc") {
  auto [t, profile] = synth({100, 600, 300});
  const PipelineConfig pc = config2();
  EnergyModel em;
  BenchResult b;
  b.benchmark = "workload";
  b.n_classes = 2;
  b.sim = simulate(t, profile, perfect(pc.cfg), pc, em);
  const std::vector<BenchResult> one{b};

  const std::string table = format_report_table(one);
  // expected report column order
  const auto ps = table.find("practical_speedup");
  const auto pw = table.find("power_overhead_pct");
  const auto en = table.find("energy_overhead_pct");
  const auto ic = table.find("instructions");
  REQUIRE(ps != std::string::npos);
  CHECK(ps < pw);
  CHECK(pw < en);
  CHECK(en < ic);

  const nlohmann::json doc = report_doc(one);
  CHECK(doc.at("benchmarks").size() == 1);
  // single benchmark: the average equals the benchmark value
  CHECK(doc.at("average").at("practical_speedup").get<double>() ==
        doctest::Approx(b.sim.speedup_practical).epsilon(1e-9));

  BenchResult c = b;
  c.sim.speedup_practical = b.sim.speedup_practical + 0.5;
  const nlohmann::json doc2 = report_doc({b, c});
  CHECK(doc2.at("average").at("practical_speedup").get<double>() ==
        doctest::Approx(b.sim.speedup_practical + 0.25).epsilon(1e-9));

  const std::string csv = format_power_series_csv(b.sim);
  CHECK(csv.rfind("n_instructions,avg_power_overhead\n", 0) == 0);
}
